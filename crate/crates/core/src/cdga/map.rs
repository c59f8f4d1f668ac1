use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{CdgaError, CdgaJson, PresentedCdga};
use crate::exact::{MultiPoly, PolyJson, Rational};

/// An algebra map between presentations, given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaMap {
    source: PresentedCdga,
    target: PresentedCdga,
    images: Vec<MultiPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapViolation {
    Degree {
        generator: String,
        expected: i64,
        found: Vec<i64>,
    },
    Chain {
        generator: String,
        d_of_image: String,
        image_of_d: String,
    },
    Relation {
        relation: String,
        image: String,
    },
}

impl fmt::Display for MapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapViolation::Degree {
                generator,
                expected,
                found,
            } => write!(f, "image of {generator} has degree {found:?}, expected {expected}"),
            MapViolation::Chain {
                generator,
                d_of_image,
                image_of_d,
            } => write!(
                f,
                "d(f({generator})) = {d_of_image} but f(d({generator})) = {image_of_d}"
            ),
            MapViolation::Relation { relation, image } => {
                write!(f, "relation {relation} maps to {image}, not zero")
            }
        }
    }
}

impl CdgaMap {
    /// Builds a map from one image per source generator. Images are given
    /// over (a subset of) the target generators.
    pub fn new(
        source: PresentedCdga,
        target: PresentedCdga,
        assignment: &BTreeMap<String, MultiPoly>,
    ) -> Result<Self, CdgaError> {
        for name in assignment.keys() {
            source.index_of(name)?;
        }
        let images = source
            .generators()
            .iter()
            .map(|g| {
                assignment
                    .get(&g.name)
                    .ok_or_else(|| CdgaError::Malformed(format!("no image given for {:?}", g.name)))
                    .and_then(|p| Ok(target.reduce(&p.rebase(target.vars())?)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CdgaMap {
            source,
            target,
            images,
        })
    }

    /// Builds a map from expressions parsed in the target. Generators that
    /// are not listed map to zero.
    pub fn from_exprs(
        source: PresentedCdga,
        target: PresentedCdga,
        exprs: &[(&str, &str)],
    ) -> Result<Self, CdgaError> {
        let mut assignment: BTreeMap<String, MultiPoly> = source
            .generators()
            .iter()
            .map(|g| (g.name.clone(), target.zero()))
            .collect();
        for (name, expr) in exprs {
            source.index_of(name)?;
            assignment.insert(name.to_string(), target.parse(expr)?);
        }
        Self::new(source, target, &assignment)
    }

    /// Sends each source generator to the target generator of the same name,
    /// or to zero when the target has no such generator.
    pub fn by_name(source: PresentedCdga, target: PresentedCdga) -> Self {
        let images = source
            .generators()
            .iter()
            .map(|g| target.gen(&g.name).unwrap_or_else(|_| target.zero()))
            .collect();
        CdgaMap {
            source,
            target,
            images,
        }
    }

    pub fn identity(a: &PresentedCdga) -> Self {
        Self::by_name(a.clone(), a.clone())
    }

    pub fn source(&self) -> &PresentedCdga {
        &self.source
    }

    pub fn target(&self) -> &PresentedCdga {
        &self.target
    }

    pub fn images(&self) -> &[MultiPoly] {
        &self.images
    }

    pub fn image_of(&self, name: &str) -> Result<&MultiPoly, CdgaError> {
        Ok(&self.images[self.source.index_of(name)?])
    }

    pub fn assignment(&self) -> BTreeMap<String, MultiPoly> {
        self.source
            .generators()
            .iter()
            .zip(&self.images)
            .map(|(g, p)| (g.name.clone(), p.clone()))
            .collect()
    }

    /// Image of a source element, reduced modulo the target relations.
    pub fn apply(&self, x: &MultiPoly) -> MultiPoly {
        let t = &self.target;
        let mut out = t.zero();
        for (m, c) in x.terms() {
            let mut term = t.constant(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = t.mul(&term, &self.images[i]);
                }
                if term.is_zero() {
                    break;
                }
            }
            out.add_scaled(&term, &Rational::one());
        }
        t.reduce(&out)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &CdgaMap) -> Result<CdgaMap, CdgaError> {
        if self.target != next.source {
            return Err(CdgaError::Malformed("maps are not composable".into()));
        }
        Ok(CdgaMap {
            source: self.source.clone(),
            target: next.target.clone(),
            images: self.images.iter().map(|p| next.apply(p)).collect(),
        })
    }

    /// Degree, chain and relation checks on generators.
    pub fn check(&self) -> Vec<MapViolation> {
        let (s, t) = (&self.source, &self.target);
        let mut out = Vec::new();
        for (i, g) in s.generators().iter().enumerate() {
            let img = &self.images[i];
            match t.homogeneous_degree(img) {
                Ok(None) => {}
                Ok(Some(d)) if d == g.degree as i64 => {}
                Ok(Some(d)) => out.push(MapViolation::Degree {
                    generator: g.name.clone(),
                    expected: g.degree as i64,
                    found: vec![d],
                }),
                Err(ds) => out.push(MapViolation::Degree {
                    generator: g.name.clone(),
                    expected: g.degree as i64,
                    found: ds,
                }),
            }
            let lhs = t.reduce(&t.d(img));
            let rhs = self.apply(s.d_gen(i));
            if lhs != rhs {
                out.push(MapViolation::Chain {
                    generator: g.name.clone(),
                    d_of_image: lhs.to_string(),
                    image_of_d: rhs.to_string(),
                });
            }
        }
        for r in s.relations() {
            let img = self.apply(r);
            if !img.is_zero() {
                out.push(MapViolation::Relation {
                    relation: r.to_string(),
                    image: img.to_string(),
                });
            }
        }
        out
    }

    pub fn is_cdga_map(&self) -> bool {
        self.check().is_empty()
    }

    pub fn to_json(&self) -> CdgaMapJson {
        CdgaMapJson {
            source: self.source.to_json(),
            target: self.target.to_json(),
            assignment: self
                .assignment()
                .into_iter()
                .map(|(k, p)| (k, p.to_json()))
                .collect(),
        }
    }

    pub fn from_json(json: &CdgaMapJson) -> Result<Self, CdgaError> {
        let source = PresentedCdga::from_json(&json.source)?;
        let target = PresentedCdga::from_json(&json.target)?;
        let mut assignment: BTreeMap<String, MultiPoly> = source
            .generators()
            .iter()
            .map(|g| (g.name.clone(), target.zero()))
            .collect();
        for (k, p) in &json.assignment {
            assignment.insert(k.clone(), MultiPoly::from_json(p)?);
        }
        Self::new(source, target, &assignment)
    }
}

impl fmt::Display for CdgaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .source
            .generators()
            .iter()
            .zip(&self.images)
            .map(|(g, p)| format!("{} -> {}", g.name, p))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdgaMapJson {
    pub source: CdgaJson,
    pub target: CdgaJson,
    pub assignment: BTreeMap<String, PolyJson>,
}
