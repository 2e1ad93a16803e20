//! Run configuration. Numbers are written as decimal strings (plain TOML
//! numbers are accepted too), complex entries as `[re, im]` pairs, and
//! unknown keys are rejected everywhere.

use std::fmt;
use std::path::Path;

use entroloss_core::channels::QuantumOperation;
use entroloss_core::energy::{Hamiltonian, LevelLaw};
use entroloss_core::linalg::{CMatrix, CVector};
use entroloss_core::{DensityState, OptimizerBudget};
use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::CliError;

/// A real number given as a decimal string or a TOML number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a decimal number as a string")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Num, E> {
                let t = s.trim();
                // decimal notation only: no hex, no locale separators, no nan
                let ok = !t.is_empty()
                    && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
                match t.parse::<f64>() {
                    Ok(x) if ok && x.is_finite() => Ok(Num(x)),
                    _ => Err(E::custom(format!("`{s}` is not a decimal number"))),
                }
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Num, E> {
                Ok(Num(x))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Num, E> {
                Ok(Num(x as f64))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Num, E> {
                Ok(Num(x as f64))
            }
        }
        d.deserialize_any(V)
    }
}

/// A nonnegative integer given as a decimal string or a TOML integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Int(pub u64);

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Int;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative integer as a string")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Int, E> {
                s.trim()
                    .parse::<u64>()
                    .map(Int)
                    .map_err(|_| E::custom(format!("`{s}` is not a nonnegative integer")))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<Int, E> {
                u64::try_from(x)
                    .map(Int)
                    .map_err(|_| E::custom(format!("{x} is negative")))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<Int, E> {
                Ok(Int(x))
            }
        }
        d.deserialize_any(V)
    }
}

impl Int {
    pub fn usize(self) -> usize {
        self.0 as usize
    }
}

pub type ComplexLit = [Num; 2];

fn complex(c: &ComplexLit) -> Complex64 {
    Complex64::new(c[0].0, c[1].0)
}

fn matrix(rows: &[Vec<ComplexLit>], what: &str) -> Result<CMatrix, CliError> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::Config(format!("{what}: matrix literal must be nonempty and rectangular")));
    }
    Ok(CMatrix::from_fn(n, cols, |i, j| complex(&rows[i][j])))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Quantity,
    Sequence,
    Suite,
    Report,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Quantity => "quantity",
            Command::Sequence => "sequence",
            Command::Suite => "suite",
            Command::Report => "report",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: Option<Int>,
    pub quantity: Option<QuantitySpec>,
    pub state: Option<StateSpec>,
    pub sigma: Option<StateSpec>,
    pub channel: Option<ChannelSpec>,
    pub hamiltonian: Option<HamiltonianSpec>,
    pub budget: Option<BudgetSpec>,
    pub sequence: Option<SequenceSpec>,
    pub suite: Option<SuiteSpec>,
    pub report: Option<ReportSpec>,
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantitySpec {
    pub name: String,
    /// Rank or extension-dimension parameter.
    pub k: Option<Int>,
    /// Ensemble size for convex roofs, outcome count for measurements.
    pub members: Option<Int>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub dims: Option<Vec<Int>>,
    pub diag: Option<Vec<Num>>,
    pub pure: Option<Vec<ComplexLit>>,
    pub matrix: Option<Vec<Vec<ComplexLit>>>,
}

impl StateSpec {
    pub fn build(&self, what: &str) -> Result<DensityState, CliError> {
        let given = [self.diag.is_some(), self.pure.is_some(), self.matrix.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(CliError::Config(format!("[{what}]: give exactly one of `diag`, `pure`, `matrix`")));
        }
        let d = if let Some(p) = &self.diag {
            p.len()
        } else if let Some(v) = &self.pure {
            v.len()
        } else {
            self.matrix.as_ref().map_or(0, Vec::len)
        };
        let dims: Vec<usize> = match &self.dims {
            Some(v) => v.iter().map(|x| x.usize()).collect(),
            None => vec![d],
        };
        if dims.iter().product::<usize>() != d {
            return Err(CliError::Config(format!(
                "[{what}]: dims {dims:?} do not multiply to the dimension {d}"
            )));
        }
        let lib = |e: entroloss_core::Error| CliError::Config(format!("[{what}]: {e}"));
        if let Some(p) = &self.diag {
            DensityState::diagonal(p.iter().map(|x| x.0).collect(), dims).map_err(lib)
        } else if let Some(v) = &self.pure {
            let psi = CVector::from_iterator(v.len(), v.iter().map(complex));
            if psi.norm() == 0.0 {
                return Err(CliError::Config(format!("[{what}]: zero vector")));
            }
            DensityState::pure(&psi, dims).map_err(lib)
        } else {
            let m = matrix(self.matrix.as_ref().expect("checked above"), what)?;
            DensityState::from_matrix(m, dims).map_err(lib)
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Identity,
    Depolarizing,
    Dephasing,
    PartialTrace,
    MeasurePrepare,
    Kraus,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub dim: Option<Int>,
    pub p: Option<Num>,
    /// `[d_A, d_B]` for `partial_trace`.
    pub dims: Option<Vec<Int>>,
    pub keep_first: Option<bool>,
    pub povm: Option<Vec<Vec<Vec<ComplexLit>>>>,
    pub preps: Option<Vec<StateSpec>>,
    pub kraus: Option<Vec<Vec<Vec<ComplexLit>>>>,
}

impl ChannelSpec {
    pub fn build(&self) -> Result<QuantumOperation, CliError> {
        let need = |x: Option<Int>, key: &str| {
            x.map(Int::usize)
                .ok_or_else(|| CliError::Config(format!("[channel]: `{key}` is required for this kind")))
        };
        let lib = |e: entroloss_core::Error| CliError::Config(format!("[channel]: {e}"));
        let p = || {
            self.p
                .map(|x| x.0)
                .ok_or_else(|| CliError::Config("[channel]: `p` is required for this kind".into()))
        };
        match self.kind {
            ChannelKind::Identity => Ok(QuantumOperation::identity(need(self.dim, "dim")?)),
            ChannelKind::Depolarizing => QuantumOperation::depolarizing(need(self.dim, "dim")?, p()?).map_err(lib),
            ChannelKind::Dephasing => QuantumOperation::dephasing(need(self.dim, "dim")?, p()?).map_err(lib),
            ChannelKind::PartialTrace => {
                let dims = self
                    .dims
                    .as_ref()
                    .filter(|v| v.len() == 2)
                    .ok_or_else(|| CliError::Config("[channel]: partial_trace needs `dims = [d_A, d_B]`".into()))?;
                QuantumOperation::partial_trace(dims[0].usize(), dims[1].usize(), self.keep_first.unwrap_or(true))
                    .map_err(lib)
            }
            ChannelKind::MeasurePrepare => {
                let povm = self
                    .povm
                    .as_ref()
                    .ok_or_else(|| CliError::Config("[channel]: measure_prepare needs `povm`".into()))?;
                let preps = self
                    .preps
                    .as_ref()
                    .ok_or_else(|| CliError::Config("[channel]: measure_prepare needs `preps`".into()))?;
                let povm = povm.iter().map(|m| matrix(m, "channel.povm")).collect::<Result<Vec<_>, _>>()?;
                let preps = preps.iter().map(|s| s.build("channel.preps")).collect::<Result<Vec<_>, _>>()?;
                QuantumOperation::measure_prepare(&povm, &preps).map_err(lib)
            }
            ChannelKind::Kraus => {
                let ks = self
                    .kraus
                    .as_ref()
                    .ok_or_else(|| CliError::Config("[channel]: kind `kraus` needs `kraus`".into()))?;
                let ks = ks.iter().map(|m| matrix(m, "channel.kraus")).collect::<Result<Vec<_>, _>>()?;
                QuantumOperation::from_kraus(ks).map_err(lib)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    Log,
    Linear,
    Table,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawParams {
    pub a: Option<Num>,
    pub c: Option<Num>,
    pub e0: Option<Num>,
    pub slope: Option<Num>,
    pub levels: Option<Vec<Num>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    pub kind: LawKind,
    #[serde(default)]
    pub params: LawParams,
    pub truncation: Option<Int>,
}

impl HamiltonianSpec {
    pub fn build(&self) -> Result<Hamiltonian, CliError> {
        let p = &self.params;
        let get = |x: Option<Num>, key: &str| {
            x.map(|n| n.0)
                .ok_or_else(|| CliError::Config(format!("[hamiltonian.params]: `{key}` is required")))
        };
        let law = match self.kind {
            LawKind::Log => LevelLaw::Log {
                a: get(p.a, "a")?,
                c: p.c.map_or(0.0, |n| n.0),
            },
            LawKind::Linear => LevelLaw::Linear {
                e0: p.e0.map_or(0.0, |n| n.0),
                slope: get(p.slope, "slope")?,
            },
            LawKind::Table => LevelLaw::Table {
                levels: p
                    .levels
                    .as_ref()
                    .ok_or_else(|| CliError::Config("[hamiltonian.params]: `levels` is required".into()))?
                    .iter()
                    .map(|n| n.0)
                    .collect(),
            },
        };
        let d = match (&law, self.truncation) {
            (_, Some(t)) => t.usize(),
            (LevelLaw::Table { levels }, None) => levels.len(),
            (_, None) => 1 << 20,
        };
        Hamiltonian::new(law, d).map_err(|e| CliError::Config(format!("[hamiltonian]: {e}")))
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    pub restarts: Option<Int>,
    pub iterations: Option<Int>,
    pub seed: Option<Int>,
}

impl BudgetSpec {
    pub fn apply(&self, base: OptimizerBudget) -> OptimizerBudget {
        OptimizerBudget {
            restarts: self.restarts.map_or(base.restarts, Int::usize),
            iterations: self.iterations.map_or(base.iterations, Int::usize),
            seed: self.seed.map_or(base.seed, |s| s.0),
            ..base
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub family: String,
    pub functionals: Vec<String>,
    pub window: Option<Int>,
    pub grid: Option<Vec<Int>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    /// Suite ids, or `["all"]`.
    pub ids: Vec<String>,
    pub window: Option<Int>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSpec {
    /// Directory holding suite reports; defaults to the output directory.
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub format: Option<Format>,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_as_strings_or_literals() {
        let c = parse(
            r#"
            [state]
            diag = ["0.25", 0.75]
            "#,
        )
        .unwrap();
        let s = c.state.unwrap().build("state").unwrap();
        assert_eq!(s.diagonal_entries().unwrap(), &[0.25, 0.75]);
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_name() {
        let e = parse("[state]\ndiag = [\"1\"]\ncolour = \"red\"\n").unwrap_err();
        let CliError::Config(m) = e else { panic!() };
        assert!(m.contains("colour"), "{m}");
        assert!(m.contains("line 3"), "{m}");
    }

    #[test]
    fn bad_decimal_is_rejected() {
        for bad in ["\"0x10\"", "\"1,5\"", "\"nan\"", "\"\""] {
            assert!(parse(&format!("[state]\ndiag = [{bad}]\n")).is_err(), "{bad}");
        }
    }

    #[test]
    fn complex_pairs() {
        let c = parse(
            r#"
            [state]
            dims = ["2"]
            matrix = [[["0.5", "0"], ["0", "-0.5"]], [["0", "0.5"], ["0.5", "0"]]]
            "#,
        )
        .unwrap();
        let s = c.state.unwrap().build("state").unwrap();
        assert!((s.to_dense()[(0, 1)].im + 0.5).abs() < 1e-15);
    }

    #[test]
    fn state_needs_one_form() {
        let c = parse("[state]\n").unwrap();
        assert!(c.state.unwrap().build("state").is_err());
    }

    #[test]
    fn channels_and_laws() {
        let c = parse(
            r#"
            [channel]
            kind = "depolarizing"
            dim = "2"
            p = "0.5"
            [hamiltonian]
            kind = "log"
            params = { a = "1" }
            "#,
        )
        .unwrap();
        assert_eq!(c.channel.unwrap().build().unwrap().d_out(), 2);
        let h = c.hamiltonian.unwrap().build().unwrap();
        assert!((h.level(1) - 2f64.ln()).abs() < 1e-15);
    }
}
