//! JSON file formats for measures, forward maps, couplings and solve results.
//!
//! ```text
//! measure: {"dim": n, "atoms": [{"point": [..], "weight": w}, ...]}
//! map:     {"domain_dim": m, "codomain_dim": n, "pairs": [{"theta": [..], "image": [..]}, ...]}
//! coupling:{"rows": [[..], ..], "cols": [[..], ..], "plan": [[..], ..]}   (row-major)
//! ```
//!
//! Every real is written with 17 significant digits so files round-trip
//! bit-exactly. Non-finite values are written as the strings `"inf"`,
//! `"-inf"` and `"nan"`.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, ForwardMap, Point};
use crate::scalar::Scalar;
use crate::solver::{SolveResult, SolverOptions};
use crate::transport::Coupling;

/// `f64` that serializes with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Real(pub f64);

impl Real {
    pub fn of<T: Scalar>(x: T) -> Self {
        Real(x.as_f64())
    }
}

/// Decimal rendering with 17 significant digits, as used in every output file.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let text = format_real(self.0);
        if self.0.is_finite() {
            let raw = RawValue::from_string(text).map_err(serde::ser::Error::custom)?;
            raw.serialize(serializer)
        } else {
            serializer.serialize_str(&text)
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Real, E> {
                Ok(Real(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Real, E> {
                match v {
                    "inf" | "+inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    "nan" => Ok(Real(f64::NAN)),
                    other => other.parse().map(Real).map_err(E::custom),
                }
            }
        }

        deserializer.deserialize_any(RealVisitor)
    }
}

fn reals<T: Scalar>(xs: &[T]) -> Vec<Real> {
    xs.iter().map(|&x| Real::of(x)).collect()
}

fn point_from<T: Scalar>(coords: &[Real]) -> Result<Point<T>> {
    let coords = coords
        .iter()
        .map(|r| T::from_f64(r.0).ok_or(Error::NonFinite))
        .collect::<Result<Vec<T>>>()?;
    Point::new(coords)
}

fn scalar_from<T: Scalar>(r: Real) -> Result<T> {
    T::from_f64(r.0).ok_or(Error::NonFinite)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomFile {
    pub point: Vec<Real>,
    pub weight: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub dim: usize,
    pub atoms: Vec<AtomFile>,
}

impl MeasureFile {
    pub fn from_measure<T: Scalar>(m: &DiscreteMeasure<T>) -> Self {
        MeasureFile {
            dim: m.dim(),
            atoms: m
                .atoms()
                .iter()
                .map(|a| AtomFile {
                    point: reals(a.point.coords()),
                    weight: Real::of(a.weight),
                })
                .collect(),
        }
    }

    pub fn to_measure<T: Scalar>(&self) -> Result<DiscreteMeasure<T>> {
        let mut points = Vec::with_capacity(self.atoms.len());
        let mut weights = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            let p = point_from::<T>(&atom.point)?;
            if p.dim() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: p.dim(),
                });
            }
            points.push(p);
            weights.push(scalar_from(atom.weight)?);
        }
        DiscreteMeasure::new(points, weights)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFile {
    pub theta: Vec<Real>,
    pub image: Vec<Real>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub pairs: Vec<PairFile>,
}

impl MapFile {
    pub fn from_map<T: Scalar>(map: &ForwardMap<T>) -> Self {
        MapFile {
            domain_dim: map.domain_dim(),
            codomain_dim: map.codomain_dim(),
            pairs: map
                .pairs()
                .map(|(t, g)| PairFile {
                    theta: reals(t.coords()),
                    image: reals(g.coords()),
                })
                .collect(),
        }
    }

    pub fn to_map<T: Scalar>(&self) -> Result<ForwardMap<T>> {
        let pairs = self
            .pairs
            .iter()
            .map(|p| Ok((point_from::<T>(&p.theta)?, point_from::<T>(&p.image)?)))
            .collect::<Result<Vec<_>>>()?;
        let map = ForwardMap::new(pairs)?;
        if map.domain_dim() != self.domain_dim {
            return Err(Error::DimensionMismatch {
                expected: self.domain_dim,
                got: map.domain_dim(),
            });
        }
        if map.codomain_dim() != self.codomain_dim {
            return Err(Error::DimensionMismatch {
                expected: self.codomain_dim,
                got: map.codomain_dim(),
            });
        }
        Ok(map)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingFile {
    pub rows: Vec<Vec<Real>>,
    pub cols: Vec<Vec<Real>>,
    pub plan: Vec<Vec<Real>>,
}

impl CouplingFile {
    pub fn from_coupling<T: Scalar>(c: &Coupling<T>) -> Self {
        CouplingFile {
            rows: c.rows.iter().map(|p| reals(p.coords())).collect(),
            cols: c.cols.iter().map(|p| reals(p.coords())).collect(),
            plan: c.plan.iter().map(|row| reals(row)).collect(),
        }
    }

    pub fn to_coupling<T: Scalar>(&self) -> Result<Coupling<T>> {
        let rows = self.rows.iter().map(|p| point_from(p)).collect::<Result<Vec<_>>>()?;
        let cols = self.cols.iter().map(|p| point_from(p)).collect::<Result<Vec<_>>>()?;
        if self.plan.len() != rows.len() {
            return Err(Error::LengthMismatch(rows.len(), self.plan.len()));
        }
        let plan = self
            .plan
            .iter()
            .map(|row| {
                if row.len() != cols.len() {
                    return Err(Error::LengthMismatch(cols.len(), row.len()));
                }
                row.iter().map(|&x| scalar_from(x)).collect::<Result<Vec<T>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Coupling { rows, cols, plan })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionsFile {
    pub max_iters: usize,
    pub tol: Real,
    pub step: Real,
}

impl OptionsFile {
    pub fn from_options<T: Scalar>(o: &SolverOptions<T>) -> Self {
        OptionsFile {
            max_iters: o.max_iters,
            tol: Real::of(o.tol),
            step: Real::of(o.step),
        }
    }

    pub fn to_options<T: Scalar>(&self) -> Result<SolverOptions<T>> {
        let opts = SolverOptions {
            max_iters: self.max_iters,
            tol: scalar_from(self.tol)?,
            step: scalar_from(self.step)?,
        };
        opts.validate()?;
        Ok(opts)
    }
}

/// Serialized [`SolveResult`] with the solver that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub solver: String,
    pub options: Option<OptionsFile>,
    pub wall_time_ms: Real,
    pub rho_x_star: MeasureFile,
    pub pushforward_star: MeasureFile,
    pub objective: Real,
    pub nu1: Real,
    pub nu0: Real,
    pub iterations: usize,
    pub objective_trace: Vec<Real>,
    pub status: String,
}

impl SolveRecord {
    pub fn new<T: Scalar>(
        solver: &str,
        options: Option<&SolverOptions<T>>,
        wall_time_ms: f64,
        result: &SolveResult<T>,
    ) -> Self {
        SolveRecord {
            solver: solver.to_string(),
            options: options.map(OptionsFile::from_options),
            wall_time_ms: Real(wall_time_ms),
            rho_x_star: MeasureFile::from_measure(&result.rho_x_star),
            pushforward_star: MeasureFile::from_measure(&result.pushforward_star),
            objective: Real::of(result.objective),
            nu1: Real::of(result.nu1),
            nu0: Real::of(result.nu0),
            iterations: result.iterations,
            objective_trace: reals(&result.objective_trace),
            status: result.status.name().to_string(),
        }
    }
}

pub fn to_json<S: Serialize>(value: &S) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))
}

pub fn from_json<D: for<'de> Deserialize<'de>>(text: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn measure_to_json<T: Scalar>(m: &DiscreteMeasure<T>) -> Result<String> {
    to_json(&MeasureFile::from_measure(m))
}

pub fn measure_from_json<T: Scalar>(text: &str) -> Result<DiscreteMeasure<T>> {
    from_json::<MeasureFile>(text)?.to_measure()
}

pub fn map_to_json<T: Scalar>(map: &ForwardMap<T>) -> Result<String> {
    to_json(&MapFile::from_map(map))
}

pub fn map_from_json<T: Scalar>(text: &str) -> Result<ForwardMap<T>> {
    from_json::<MapFile>(text)?.to_map()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::make_measure;

    #[test]
    fn measure_file_layout() {
        let m = make_measure(vec![Point::scalar(0.0), Point::scalar(1.0)], vec![1.0, 2.0]).unwrap();
        let text = measure_to_json(&m).unwrap();
        assert!(text.contains("\"dim\": 1"));
        assert!(text.contains("3.3333333333333331e-1"), "{text}");
        let back: DiscreteMeasure<f64> = measure_from_json(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn accepts_plain_numbers_and_rejects_bad_dims() {
        let text = r#"{"dim": 1, "atoms": [{"point": [0], "weight": 1}, {"point": [2.5], "weight": 3}]}"#;
        let m: DiscreteMeasure<f64> = measure_from_json(text).unwrap();
        assert_eq!(m.atoms()[1].weight, 0.75);
        let bad = r#"{"dim": 2, "atoms": [{"point": [0], "weight": 1}]}"#;
        assert!(measure_from_json::<f64>(bad).is_err());
        assert!(matches!(measure_from_json::<f64>("{"), Err(Error::Format(_))));
    }

    #[test]
    fn map_file_layout() {
        let text = r#"{"domain_dim": 1, "codomain_dim": 2,
            "pairs": [{"theta": [0], "image": [0, 0]}, {"theta": [1], "image": [1, 1]}]}"#;
        let map: ForwardMap<f64> = map_from_json(text).unwrap();
        assert_eq!(map.range().len(), 2);
        let again: ForwardMap<f64> = map_from_json(&map_to_json(&map).unwrap()).unwrap();
        assert_eq!(again, map);
        let wrong = text.replace("\"codomain_dim\": 2", "\"codomain_dim\": 3");
        assert!(map_from_json::<f64>(&wrong).is_err());
    }

    #[test]
    fn non_finite_reals_round_trip() {
        let text = to_json(&vec![Real(f64::INFINITY), Real(-0.5)]).unwrap();
        assert!(text.contains("\"inf\""));
        let back: Vec<Real> = from_json(&text).unwrap();
        assert_eq!(back[0].0, f64::INFINITY);
        assert_eq!(back[1].0, -0.5);
    }
}
