use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{HarnessError, Result};

/// Keys accepted in scenario configuration files.
pub const CONFIG_KEYS: [&str; 12] = [
    "problem",
    "integrator",
    "dt",
    "eps_res",
    "tol",
    "t_final",
    "order",
    "pade_num",
    "pade_den",
    "quad_nodes",
    "stride",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemId {
    Toda,
    Harmonic,
    FigureEight,
    FigureEightPerturbed,
    Duffing1,
    Duffing2,
    DuffingForced(f64),
    Kdv(usize),
    DoublePendulum,
}

impl ProblemId {
    pub fn is_hamiltonian(&self) -> bool {
        matches!(
            self,
            ProblemId::Toda | ProblemId::Harmonic | ProblemId::FigureEight | ProblemId::FigureEightPerturbed
        )
    }

    pub fn has_taylor_generator(&self) -> bool {
        !matches!(
            self,
            ProblemId::FigureEight | ProblemId::FigureEightPerturbed | ProblemId::DoublePendulum
        )
    }
}

impl FromStr for ProblemId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let bad = || HarnessError::Validation(format!("unknown problem id `{s}`"));
        let id = match (head, arg) {
            ("toda", None) => ProblemId::Toda,
            ("harmonic", None) => ProblemId::Harmonic,
            ("figure8", None) => ProblemId::FigureEight,
            ("figure8_perturbed", None) => ProblemId::FigureEightPerturbed,
            ("duffing1", None) => ProblemId::Duffing1,
            ("duffing2", None) => ProblemId::Duffing2,
            ("duffing_forced", Some(c)) => {
                let c: f64 = c.parse().map_err(|_| bad())?;
                if !c.is_finite() {
                    return Err(bad());
                }
                ProblemId::DuffingForced(c)
            }
            ("kdv", None) => ProblemId::Kdv(64),
            ("kdv", Some(m)) => {
                let m: usize = m.parse().map_err(|_| bad())?;
                if m == 0 {
                    return Err(HarnessError::Validation("kdv needs at least one mode".into()));
                }
                ProblemId::Kdv(m)
            }
            ("double_pendulum", None) => ProblemId::DoublePendulum,
            _ => return Err(bad()),
        };
        Ok(id)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemId::Toda => write!(f, "toda"),
            ProblemId::Harmonic => write!(f, "harmonic"),
            ProblemId::FigureEight => write!(f, "figure8"),
            ProblemId::FigureEightPerturbed => write!(f, "figure8_perturbed"),
            ProblemId::Duffing1 => write!(f, "duffing1"),
            ProblemId::Duffing2 => write!(f, "duffing2"),
            ProblemId::DuffingForced(c) => write!(f, "duffing_forced:{c}"),
            ProblemId::Kdv(m) => write!(f, "kdv:{m}"),
            ProblemId::DoublePendulum => write!(f, "double_pendulum"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegratorId {
    Euler,
    ImplicitEuler,
    SympEulerA,
    SympEulerB,
    Verlet,
    Rk4,
    Rk4Sym,
    Irk(PathBuf),
    Rk4Adaptive,
    Bpl,
    Dirac1,
    Dirac2,
    EulerConstrained,
}

/// Which step-size parameter an integrator consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Fixed,
    Tolerance,
    Residual,
}

impl IntegratorId {
    pub fn parse(s: &str, base_dir: &Path) -> Result<Self> {
        let id = match s {
            "euler" => IntegratorId::Euler,
            "ieuler" => IntegratorId::ImplicitEuler,
            "sympeuler_a" => IntegratorId::SympEulerA,
            "sympeuler_b" => IntegratorId::SympEulerB,
            "verlet" => IntegratorId::Verlet,
            "rk4" => IntegratorId::Rk4,
            "rk4sym" => IntegratorId::Rk4Sym,
            "rk4_adaptive" => IntegratorId::Rk4Adaptive,
            "bpl" => IntegratorId::Bpl,
            "dirac1" => IntegratorId::Dirac1,
            "dirac2" => IntegratorId::Dirac2,
            "euler_constrained" => IntegratorId::EulerConstrained,
            _ => match s.strip_prefix("irk:") {
                Some(path) if !path.is_empty() => IntegratorId::Irk(base_dir.join(path)),
                _ => return Err(HarnessError::Validation(format!("unknown integrator id `{s}`"))),
            },
        };
        Ok(id)
    }

    pub fn control(&self) -> StepControl {
        match self {
            IntegratorId::Rk4Adaptive => StepControl::Tolerance,
            IntegratorId::Bpl => StepControl::Residual,
            _ => StepControl::Fixed,
        }
    }

    fn supports(&self, problem: &ProblemId) -> bool {
        match self {
            IntegratorId::Dirac1 | IntegratorId::Dirac2 | IntegratorId::EulerConstrained => {
                *problem == ProblemId::DoublePendulum
            }
            IntegratorId::Rk4 | IntegratorId::Rk4Adaptive => *problem != ProblemId::DoublePendulum,
            IntegratorId::Bpl => problem.has_taylor_generator(),
            _ => problem.is_hamiltonian(),
        }
    }
}

impl fmt::Display for IntegratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IntegratorId::Euler => "euler",
            IntegratorId::ImplicitEuler => "ieuler",
            IntegratorId::SympEulerA => "sympeuler_a",
            IntegratorId::SympEulerB => "sympeuler_b",
            IntegratorId::Verlet => "verlet",
            IntegratorId::Rk4 => "rk4",
            IntegratorId::Rk4Sym => "rk4sym",
            IntegratorId::Irk(p) => return write!(f, "irk:{}", p.display()),
            IntegratorId::Rk4Adaptive => "rk4_adaptive",
            IntegratorId::Bpl => "bpl",
            IntegratorId::Dirac1 => "dirac1",
            IntegratorId::Dirac2 => "dirac2",
            IntegratorId::EulerConstrained => "euler_constrained",
        };
        f.write_str(s)
    }
}

/// One configured run: problem, integrator and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub problem: ProblemId,
    pub integrator: IntegratorId,
    pub dt: Option<f64>,
    pub eps_res: Option<f64>,
    /// Error tolerance of `rk4_adaptive`.
    pub tol: Option<f64>,
    pub t_final: f64,
    pub order: usize,
    /// Padé degrees; when unset they split `order - 1` with the larger share in the denominator.
    pub pade_num: Option<usize>,
    pub pade_den: Option<usize>,
    pub quad_nodes: usize,
    pub stride: usize,
    pub out: Option<PathBuf>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            HarnessError::Validation(format!("line {}: expected `key = value`, got `{raw}`", lineno + 1))
        })?;
        let key = key.trim();
        check_key(key)?;
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(HarnessError::Validation(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(map)
}

pub fn check_key(key: &str) -> Result<()> {
    if CONFIG_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(HarnessError::Validation(format!("unknown configuration key `{key}`")))
    }
}

fn number<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| HarnessError::Validation(format!("`{key}` has invalid value `{v}`")))
        })
        .transpose()
}

impl Scenario {
    /// Builds and validates a scenario. Relative paths (tableau files, `out`) resolve against
    /// `base_dir`.
    pub fn from_map(map: &BTreeMap<String, String>, base_dir: &Path) -> Result<Self> {
        for key in map.keys() {
            check_key(key)?;
        }
        let required = |key: &str| {
            map.get(key)
                .ok_or_else(|| HarnessError::Validation(format!("missing required key `{key}`")))
        };
        let problem: ProblemId = required("problem")?.parse()?;
        let integrator = IntegratorId::parse(required("integrator")?, base_dir)?;
        let t_final = number::<f64>(map, "t_final")?
            .ok_or_else(|| HarnessError::Validation("missing required key `t_final`".into()))?;
        let s = Scenario {
            problem,
            integrator,
            dt: number(map, "dt")?,
            eps_res: number(map, "eps_res")?,
            tol: number(map, "tol")?,
            t_final,
            order: number(map, "order")?.unwrap_or(10),
            pade_num: number(map, "pade_num")?,
            pade_den: number(map, "pade_den")?,
            quad_nodes: number(map, "quad_nodes")?.unwrap_or(20),
            stride: number(map, "stride")?.unwrap_or(1),
            out: map.get("out").map(|p| base_dir.join(p)),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn from_text(text: &str, base_dir: &Path) -> Result<Self> {
        Self::from_map(&parse_config(text)?, base_dir)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(HarnessError::Validation(msg));
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return invalid(format!("t_final must be positive and finite, got {}", self.t_final));
        }
        if !self.integrator.supports(&self.problem) {
            return invalid(format!(
                "integrator `{}` cannot run problem `{}`",
                self.integrator, self.problem
            ));
        }
        let given = [("dt", self.dt), ("eps_res", self.eps_res), ("tol", self.tol)];
        let wanted = match self.integrator.control() {
            StepControl::Fixed => "dt",
            StepControl::Tolerance => "tol",
            StepControl::Residual => "eps_res",
        };
        for (key, value) in given {
            match (key == wanted, value) {
                (true, None) => return invalid(format!("integrator `{}` needs `{key}`", self.integrator)),
                (true, Some(v)) if !(v > 0.0) || !v.is_finite() => {
                    return invalid(format!("`{key}` must be positive and finite, got {v}"))
                }
                (false, Some(_)) => {
                    return invalid(format!("`{key}` does not apply to integrator `{}`", self.integrator))
                }
                _ => {}
            }
        }
        if self.stride == 0 {
            return invalid("stride must be at least 1".into());
        }
        if self.integrator == IntegratorId::Bpl {
            let cfg = crate::bpl::BplConfig {
                order: self.order,
                pade_num: self.pade_degrees().0,
                pade_den: self.pade_degrees().1,
                quad_nodes: self.quad_nodes,
                eps_res: self.eps_res.unwrap_or(0.0),
                ..Default::default()
            };
            cfg.validate().map_err(|e| HarnessError::Validation(e.to_string()))?;
        }
        if let IntegratorId::Irk(path) = &self.integrator {
            crate::integrators::ButcherTableau::from_file(path)
                .map_err(|e| HarnessError::Validation(format!("tableau {}: {e}", path.display())))?;
        }
        Ok(())
    }

    /// Sets one key from its textual value, re-validating the result.
    pub fn with_override(&self, key: &str, value: &str, base_dir: &Path) -> Result<Self> {
        let mut map = self.to_map();
        check_key(key)?;
        map.insert(key.to_string(), value.to_string());
        Self::from_map(&map, base_dir)
    }

    /// Numerator and denominator degrees used by BPL.
    pub fn pade_degrees(&self) -> (usize, usize) {
        let budget = self.order.saturating_sub(1);
        match (self.pade_num, self.pade_den) {
            (Some(m), Some(n)) => (m, n),
            (Some(m), None) => (m, budget.saturating_sub(m)),
            (None, Some(n)) => (budget.saturating_sub(n), n),
            (None, None) => (budget / 2, budget - budget / 2),
        }
    }

    /// Configuration entries reproducing this scenario.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        map.insert("problem".into(), self.problem.to_string());
        map.insert("integrator".into(), self.integrator.to_string());
        for (key, value) in [("dt", self.dt), ("eps_res", self.eps_res), ("tol", self.tol)] {
            if let Some(v) = value {
                map.insert(key.into(), v.to_string());
            }
        }
        map.insert("t_final".into(), self.t_final.to_string());
        map.insert("order".into(), self.order.to_string());
        for (key, value) in [("pade_num", self.pade_num), ("pade_den", self.pade_den)] {
            if let Some(v) = value {
                map.insert(key.into(), v.to_string());
            }
        }
        map.insert("quad_nodes".into(), self.quad_nodes.to_string());
        map.insert("stride".into(), self.stride.to_string());
        if let Some(out) = &self.out {
            map.insert("out".into(), out.display().to_string());
        }
        map
    }
}
