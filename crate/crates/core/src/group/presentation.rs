use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{MapClass, ModelDim, MoebiusMap};
use crate::policy::POLICY;

/// A finitely generated group given by its generators. Discreteness is assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPresentation {
    name: String,
    model: ModelDim,
    generators: Vec<MoebiusMap>,
}

impl GroupPresentation {
    pub fn new(name: impl Into<String>, model: ModelDim, generators: Vec<MoebiusMap>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::usage("a presentation needs at least one generator"));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.model() != model {
                return Err(Error::usage(format!("generator {} has the wrong dimension", i + 1)));
            }
            if g.classify() == MapClass::Identity {
                return Err(Error::usage(format!("generator {} is the identity", i + 1)));
            }
            for (j, h) in generators[..i].iter().enumerate() {
                if g.matrix_distance(h) <= POLICY.construction {
                    return Err(Error::usage(format!(
                        "generators {} and {} coincide",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(GroupPresentation {
            name: name.into(),
            model,
            generators,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> ModelDim {
        self.model
    }

    pub fn generators(&self) -> &[MoebiusMap] {
        &self.generators
    }

    /// Letters in enumeration order: `+1, -1, +2, -2, ...`.
    pub(crate) fn letters(&self) -> Vec<(Letter, MoebiusMap)> {
        self.generators
            .iter()
            .enumerate()
            .flat_map(|(i, g)| {
                let i = i as i32 + 1;
                [(Letter(i), *g), (Letter(-i), g.inverse())]
            })
            .collect()
    }

    /// Map represented by a word.
    pub fn evaluate(&self, word: &Word) -> Result<MoebiusMap> {
        let mut m = MoebiusMap::identity(self.model);
        for l in word.letters() {
            let idx = l.generator();
            let g = self
                .generators
                .get(idx)
                .ok_or_else(|| Error::usage(format!("word uses unknown generator {}", idx + 1)))?;
            let g = if l.is_inverse() { g.inverse() } else { *g };
            m = m.compose_unchecked(&g);
        }
        Ok(m)
    }

    /// Advisory two-generator discreteness test: Jorgensen's inequality
    /// `|tr^2 A - 4| + |tr [A, B] - 2| >= 1` holds for discrete non-elementary
    /// groups. Returns the left side when it is below one.
    pub fn jorgensen_warning(&self) -> Option<f64> {
        let [a, b] = self.generators.as_slice() else {
            return None;
        };
        let comm = a.compose_unchecked(b).compose_unchecked(&a.inverse()).compose_unchecked(&b.inverse());
        let ta = a.trace();
        // The sign of tr[A, B] does not depend on the lift to SL(2, C).
        let value = (ta * ta - 4.0).norm() + (comm.trace() - 2.0).norm().min((comm.trace() + 2.0).norm());
        (value < 1.0).then_some(value)
    }
}

/// Signed generator index: `+i` is generator `i` (1-based), `-i` its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(pub i32);

impl Letter {
    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }
}

/// A word in the generators and their inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub(crate) fn extended(&self, l: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(l);
        Word(v)
    }
}

/// Lowercase letters for generators, uppercase for inverses, `e` for the empty
/// word. Beyond 26 generators, signed indices joined by `.`.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        if self.0.iter().all(|l| l.generator() < 26) {
            for l in &self.0 {
                let base = if l.is_inverse() { b'A' } else { b'a' };
                write!(f, "{}", (base + l.generator() as u8) as char)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|l| format!("{:+}", l.0)).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}
