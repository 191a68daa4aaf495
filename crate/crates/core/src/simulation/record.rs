//! Recorded trajectories and their CSV form.
//!
//! Columns: `t, v_xyz, q_xyz, R_11..R_33, z_xyz, vhat_xyz, eta_xyz`, followed
//! when noise is enabled by the held observer signals
//! `yq_xyz, yR_11..yR_33, uomega_xyz, ua_xyz`. Floats carry 17 significant
//! digits so a written record parses back bit-for-bit.

use std::fmt::Write as _;

use crate::lie_group::{Rotation, Vec3};
use crate::rigid_body::{Measurement, RigidBodyInput};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RecordError {
    #[error("trajectory CSV is empty")]
    Empty,
    #[error("unexpected header: {0}")]
    Header(String),
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse {field:?} as a finite number")]
    Number { line: usize, field: String },
    #[error("line {line}: time is not increasing")]
    NonMonotone { line: usize },
}

/// Held observer signals when noise is enabled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisySignals {
    pub y: Measurement,
    pub u: RigidBodyInput,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub v: Vec3,
    pub q: Vec3,
    pub attitude: Rotation,
    pub z: Vec3,
    pub v_hat: Vec3,
    pub eta: Vec3,
    pub noisy: Option<NoisySignals>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryRecord {
    pub samples: Vec<TrajectorySample>,
}

const AXES: [&str; 3] = ["x", "y", "z"];
const BASE_COLUMNS: usize = 1 + 3 + 3 + 9 + 3 + 3 + 3;
const NOISY_COLUMNS: usize = 3 + 9 + 3 + 3;

fn vector_columns(prefix: &str) -> impl Iterator<Item = String> + '_ {
    AXES.iter().map(move |a| format!("{prefix}_{a}"))
}

fn matrix_columns(prefix: &str) -> impl Iterator<Item = String> + '_ {
    (1..=3).flat_map(move |i| (1..=3).map(move |j| format!("{prefix}_{i}{j}")))
}

/// Column names, with or without the noisy block.
pub fn header(noisy: bool) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend(vector_columns("v"));
    cols.extend(vector_columns("q"));
    cols.extend(matrix_columns("R"));
    cols.extend(vector_columns("z"));
    cols.extend(vector_columns("vhat"));
    cols.extend(vector_columns("eta"));
    if noisy {
        cols.extend(vector_columns("yq"));
        cols.extend(matrix_columns("yR"));
        cols.extend(vector_columns("uomega"));
        cols.extend(vector_columns("ua"));
    }
    cols
}

fn push_value(line: &mut String, x: f64) {
    let _ = write!(line, ",{x:.16e}");
}

fn push_vec(line: &mut String, v: &Vec3) {
    v.iter().for_each(|x| push_value(line, *x));
}

fn push_rotation(line: &mut String, r: &Rotation) {
    r.to_row_major().iter().for_each(|x| push_value(line, *x));
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_noisy(&self) -> bool {
        self.samples.first().is_some_and(|s| s.noisy.is_some())
    }

    pub fn to_csv(&self) -> String {
        let noisy = self.is_noisy();
        let mut out = header(noisy).join(",");
        out.push('\n');
        for s in &self.samples {
            let mut line = format!("{:.16e}", s.t);
            push_vec(&mut line, &s.v);
            push_vec(&mut line, &s.q);
            push_rotation(&mut line, &s.attitude);
            push_vec(&mut line, &s.z);
            push_vec(&mut line, &s.v_hat);
            push_vec(&mut line, &s.eta);
            if let (true, Some(n)) = (noisy, &s.noisy) {
                push_vec(&mut line, &n.y.q);
                push_rotation(&mut line, &n.y.attitude);
                push_vec(&mut line, &n.u.omega);
                push_vec(&mut line, &n.u.accel);
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`TrajectoryRecord::to_csv`].
    ///
    /// Attitudes are taken as written; no re-projection is applied.
    pub fn from_csv(text: &str) -> Result<Self, RecordError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or(RecordError::Empty)?;
        let columns: Vec<&str> = head.split(',').map(str::trim).collect();
        let noisy = if columns == header(false) {
            false
        } else if columns == header(true) {
            true
        } else {
            let shown: String = head.chars().take(80).collect();
            return Err(RecordError::Header(shown));
        };
        let expected = BASE_COLUMNS + if noisy { NOISY_COLUMNS } else { 0 };

        let mut samples: Vec<TrajectorySample> = Vec::new();
        for (index, raw) in lines {
            let line = index + 1;
            let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
            if fields.len() != expected {
                return Err(RecordError::FieldCount {
                    line,
                    expected,
                    found: fields.len(),
                });
            }
            let mut values = Vec::with_capacity(expected);
            for field in &fields {
                match field.parse::<f64>() {
                    Ok(x) if x.is_finite() => values.push(x),
                    _ => {
                        return Err(RecordError::Number {
                            line,
                            field: field.chars().take(40).collect(),
                        })
                    }
                }
            }
            let mut cursor = Cursor(&values);
            let t = cursor.scalar();
            if samples.last().is_some_and(|prev| t.is_nan() || t <= prev.t) {
                return Err(RecordError::NonMonotone { line });
            }
            let mut sample = TrajectorySample {
                t,
                v: cursor.vec3(),
                q: cursor.vec3(),
                attitude: cursor.rotation(),
                z: cursor.vec3(),
                v_hat: cursor.vec3(),
                eta: cursor.vec3(),
                noisy: None,
            };
            if noisy {
                let q = cursor.vec3();
                let attitude = cursor.rotation();
                let omega = cursor.vec3();
                let accel = cursor.vec3();
                sample.noisy = Some(NoisySignals {
                    y: Measurement { q, attitude },
                    u: RigidBodyInput { omega, accel },
                });
            }
            samples.push(sample);
        }
        Ok(Self { samples })
    }
}

struct Cursor<'a>(&'a [f64]);

impl Cursor<'_> {
    fn scalar(&mut self) -> f64 {
        let (head, rest) = self.0.split_first().expect("field count checked");
        self.0 = rest;
        *head
    }

    fn vec3(&mut self) -> Vec3 {
        Vec3::new(self.scalar(), self.scalar(), self.scalar())
    }

    fn rotation(&mut self) -> Rotation {
        let (head, rest) = self.0.split_at(9);
        self.0 = rest;
        Rotation::from_matrix_unchecked(nalgebra::Matrix3::from_row_slice(head))
    }
}
