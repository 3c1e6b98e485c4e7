use std::collections::HashMap;

use super::LtsError;

/// Index of a label within its [`LabelSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub usize);

/// The finite, ordered set of transition labels.
#[derive(Debug, Clone)]
pub struct LabelSet {
    names: Vec<String>,
    index: HashMap<String, Label>,
}

impl PartialEq for LabelSet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for LabelSet {}

impl LabelSet {
    pub fn new<I, S>(names: I) -> Result<Self, LtsError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(LtsError::EmptyLabelSet);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), Label(i)).is_some() {
                return Err(LtsError::DuplicateId(n.clone()));
            }
        }
        Ok(LabelSet { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, l: Label) -> &str {
        &self.names[l.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Label> {
        self.index.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.names.len()).map(Label)
    }
}
