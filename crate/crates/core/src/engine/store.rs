use std::collections::{BTreeMap, HashSet};
use std::fmt;

use super::eval::eval;
use super::{EngineError, Model};
use crate::syntax::Init;
use crate::values::{ObjectId, Value};

/// A variable name together with its derivative order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    pub name: String,
    pub primes: u32,
}

impl Field {
    pub fn new(name: impl Into<String>, primes: u32) -> Field {
        Field { name: name.into(), primes }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, "'".repeat(self.primes as usize))
    }
}

/// A field of a particular object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub object: ObjectId,
    pub field: Field,
}

#[derive(Debug, Clone)]
pub struct ObjectInstance {
    pub id: ObjectId,
    pub class: String,
    /// Field of the parent that holds this object; empty for the root.
    pub binder: String,
    pub parent: Option<ObjectId>,
    /// Live children in creation order.
    pub children: Vec<ObjectId>,
    pub fields: BTreeMap<Field, Value>,
    /// Highest derivative order of every variable with a derivative chain.
    pub chains: BTreeMap<String, u32>,
}

/// All live objects of a simulation, rooted at one object.
#[derive(Debug, Clone)]
pub struct ObjectStore {
    objects: BTreeMap<ObjectId, ObjectInstance>,
    root: ObjectId,
    next_id: u32,
    generation: u64,
}

impl Default for ObjectStore {
    /// A store with no objects.
    fn default() -> ObjectStore {
        ObjectStore { objects: BTreeMap::new(), root: ObjectId(0), next_id: 0, generation: 0 }
    }
}

impl ObjectStore {
    pub fn root(&self) -> ObjectId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Incremented whenever an object is created or terminated.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn is_alive(&self, id: ObjectId) -> bool {
        self.objects.contains_key(&id)
    }

    pub fn get(&self, id: ObjectId) -> Result<&ObjectInstance, EngineError> {
        self.objects.get(&id).ok_or(EngineError::Dangling(id))
    }

    pub fn read(&self, id: ObjectId, field: &Field) -> Result<&Value, EngineError> {
        let obj = self.get(id)?;
        obj.fields
            .get(field)
            .ok_or_else(|| EngineError::Undeclared { object: self.describe(id), name: field.to_string() })
    }

    pub fn read_slot(&self, slot: &Slot) -> Result<&Value, EngineError> {
        self.read(slot.object, &slot.field)
    }

    /// Overwrites a declared field.
    pub fn write(&mut self, slot: &Slot, value: Value) -> Result<(), EngineError> {
        let described = self.describe(slot.object);
        let obj = self.objects.get_mut(&slot.object).ok_or(EngineError::Dangling(slot.object))?;
        match obj.fields.get_mut(&slot.field) {
            Some(v) => {
                *v = value;
                Ok(())
            }
            None => Err(EngineError::Undeclared { object: described, name: slot.field.to_string() }),
        }
    }

    /// Live objects in depth-first order, children in creation order.
    pub fn traverse(&self) -> Vec<ObjectId> {
        let mut out = Vec::with_capacity(self.objects.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if let Some(obj) = self.objects.get(&id) {
                out.push(id);
                stack.extend(obj.children.iter().rev());
            }
        }
        out
    }

    fn segment(&self, obj: &ObjectInstance) -> String {
        let Some(parent) = obj.parent.and_then(|p| self.objects.get(&p)) else {
            return obj.binder.clone();
        };
        let shadowed = parent
            .children
            .iter()
            .take_while(|&&c| c != obj.id)
            .any(|c| self.objects.get(c).is_some_and(|s| s.binder == obj.binder));
        if shadowed {
            format!("{}#{}", obj.binder, obj.id.0)
        } else {
            obj.binder.clone()
        }
    }

    /// Dotted binder path from the root; empty for the root itself.
    pub fn path_of(&self, id: ObjectId) -> String {
        let mut segments = Vec::new();
        let mut cur = self.objects.get(&id);
        while let Some(obj) = cur {
            if obj.parent.is_none() {
                break;
            }
            segments.push(self.segment(obj));
            cur = obj.parent.and_then(|p| self.objects.get(&p));
        }
        segments.reverse();
        segments.join(".")
    }

    /// Human-readable name of an object for diagnostics.
    pub fn describe(&self, id: ObjectId) -> String {
        match self.objects.get(&id) {
            Some(obj) if obj.parent.is_none() => format!("root `{}`", obj.class),
            Some(obj) => format!("`{}` ({})", self.path_of(id), obj.class),
            None => format!("dead object {id}"),
        }
    }

    /// Trace-style name of a slot, e.g. `m.p'`.
    pub fn slot_path(&self, slot: &Slot) -> String {
        let prefix = self.path_of(slot.object);
        if prefix.is_empty() {
            slot.field.to_string()
        } else {
            format!("{prefix}.{}", slot.field)
        }
    }

    /// Resolves a dotted path such as `m.p'` or `s1.f1[2]` relative to the root.
    pub fn lookup(&self, path: &str) -> Option<Value> {
        let (head, indices) = match path.find('[') {
            Some(i) => (&path[..i], &path[i..]),
            None => (path, ""),
        };
        let mut segments: Vec<&str> = head.split('.').collect();
        let last = segments.pop()?;
        let mut id = self.root;
        for seg in segments {
            let obj = self.objects.get(&id)?;
            id = *obj
                .children
                .iter()
                .find(|&&c| self.objects.get(&c).is_some_and(|child| self.segment(child) == seg))?;
        }
        let name = last.trim_end_matches('\'');
        let field = Field::new(name, (last.len() - name.len()) as u32);
        let mut value = self.objects.get(&id)?.fields.get(&field)?.clone();
        for idx in indices.split_terminator(']') {
            let i: usize = idx.strip_prefix('[')?.parse().ok()?;
            value = match value {
                Value::Vec(items) => items.into_iter().nth(i)?,
                Value::Mat(rows) => Value::real_vector(rows.get(i)?),
                _ => return None,
            };
        }
        Some(value)
    }

    /// Real-valued shorthand for [`ObjectStore::lookup`].
    pub fn lookup_real(&self, path: &str) -> Option<f64> {
        self.lookup(path)?.as_real()
    }
}

/// Creates a fresh store whose root is an instance of `class`.
pub fn instantiate_root(model: &Model, class: &str, args: Vec<Value>) -> Result<ObjectStore, EngineError> {
    let mut store = ObjectStore::default();
    let root = instantiate(model, &mut store, class, args, None)?;
    store.root = root;
    Ok(store)
}

/// Creates an instance of `class` in `store`. `parent` names the owning
/// object and the binder field that will hold the reference; the caller writes
/// that field.
pub fn instantiate(
    model: &Model,
    store: &mut ObjectStore,
    class: &str,
    args: Vec<Value>,
    parent: Option<(ObjectId, &str)>,
) -> Result<ObjectId, EngineError> {
    let def = model.class(class)?;
    if def.params.len() != args.len() {
        return Err(EngineError::Arity { class: class.to_string(), expected: def.params.len(), found: args.len() });
    }
    let mut seen = HashSet::new();
    for name in &def.params {
        if !seen.insert((name.as_str(), 0)) {
            return Err(EngineError::DuplicateDeclaration { class: class.into(), name: name.clone() });
        }
    }
    for p in &def.privates {
        if !seen.insert((p.name.as_str(), p.primes)) {
            return Err(EngineError::DuplicateDeclaration {
                class: class.into(),
                name: Field::new(p.name.clone(), p.primes).to_string(),
            });
        }
    }
    let mut chains = BTreeMap::new();
    for (name, order) in def.declared_orders() {
        if order == 0 {
            continue;
        }
        for k in 0..order {
            if !seen.contains(&(name, k)) {
                return Err(EngineError::IncompleteChain {
                    class: class.into(),
                    name: name.into(),
                    missing: Field::new(name, k).to_string(),
                });
            }
        }
        chains.insert(name.to_string(), order);
    }

    let id = ObjectId(store.next_id);
    store.next_id += 1;
    let fields = def.params.iter().map(|p| Field::new(p.clone(), 0)).zip(args).collect();
    let (parent_id, binder) = match parent {
        Some((p, b)) => (Some(p), b.to_string()),
        None => (None, String::new()),
    };
    store.objects.insert(
        id,
        ObjectInstance {
            id,
            class: class.to_string(),
            binder,
            parent: parent_id,
            children: Vec::new(),
            fields,
            chains,
        },
    );
    if let Some(p) = parent_id {
        if let Some(owner) = store.objects.get_mut(&p) {
            owner.children.push(id);
        }
    }
    store.generation += 1;

    // Initializers see the parameters and the privates declared above them.
    for private in &def.privates {
        let value = match &private.init {
            Init::Expr(e) => eval(store, id, e),
            Init::Create { class: child_class, args } => args
                .iter()
                .map(|a| eval(store, id, a))
                .collect::<Result<Vec<_>, _>>()
                .and_then(|vals| instantiate(model, store, child_class, vals, Some((id, &private.name))))
                .map(Value::Obj),
        }
        .map_err(|e| e.at(store.describe(id), private.pos))?;
        let obj = store.objects.get_mut(&id).expect("object under construction");
        obj.fields.insert(Field::new(private.name.clone(), private.primes), value);
    }
    Ok(id)
}

/// Removes `id` and all of its descendants. Terminating an object that is
/// already gone does nothing.
pub fn terminate(store: &mut ObjectStore, id: ObjectId) -> Result<(), EngineError> {
    if id == store.root && store.is_alive(id) {
        return Err(EngineError::TerminateRoot);
    }
    let Some(obj) = store.objects.remove(&id) else {
        return Ok(());
    };
    if let Some(parent) = obj.parent.and_then(|p| store.objects.get_mut(&p)) {
        parent.children.retain(|&c| c != id);
    }
    let mut pending = obj.children;
    while let Some(c) = pending.pop() {
        if let Some(child) = store.objects.remove(&c) {
            pending.extend(child.children);
        }
    }
    store.generation += 1;
    Ok(())
}
