use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Direction, Shape};
use crate::symbolic::pattern::{Constraint, PatternSystem, RectPattern, Symbol};

/// A two-dimensional subshift of finite type `X(F, P)`: alphabet `V`, window `F ⊂ N²` and
/// admissible patterns `P ⊂ V^F` listed in the order of `window`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftSpec {
    pub alphabet: Vec<String>,
    pub window: Vec<(usize, usize)>,
    pub allowed: Vec<Vec<String>>,
}

impl SftSpec {
    /// Ledrappier's subshift: `x(i+1,j) + x(i,j) + x(i,j+1) ≡ 0 (mod 2)`.
    pub fn ledrappier() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        SftSpec {
            alphabet: s(&["0", "1"]),
            // window order: x(0,0), x(1,0), x(0,1)
            window: vec![(0, 0), (1, 0), (0, 1)],
            allowed: vec![
                s(&["0", "0", "0"]),
                s(&["0", "1", "1"]),
                s(&["1", "0", "1"]),
                s(&["1", "1", "0"]),
            ],
        }
    }

    /// The unconstrained shift on `alphabet`.
    pub fn full_shift(alphabet: &[&str]) -> Self {
        SftSpec {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            window: vec![(0, 0)],
            allowed: alphabet.iter().map(|s| vec![s.to_string()]).collect(),
        }
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol> {
        self.alphabet
            .iter()
            .position(|a| a == name)
            .map(|i| i as Symbol)
            .ok_or_else(|| Error::SymbolOutOfAlphabet {
                symbol: name.to_string(),
            })
    }

    pub fn system(&self) -> Result<PatternSystem> {
        if self.alphabet.is_empty() {
            return Err(Error::InvalidModel("alphabet is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = self.alphabet.iter().find(|a| !seen.insert(a.as_str())) {
            return Err(Error::InvalidModel(format!("duplicate symbol `{dup}`")));
        }
        let allowed = self
            .allowed
            .iter()
            .map(|row| row.iter().map(|s| self.symbol(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let c = Constraint::new(&self.window, &allowed, self.alphabet.len())?;
        PatternSystem::new(self.alphabet.clone(), vec![c])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub depth: Shape,
    pub pattern_count: u128,
    pub nonempty: bool,
    pub extends_horizontally: bool,
    pub extends_vertically: bool,
    /// A depth pattern with no one-step extension, when one exists.
    pub stuck_pattern: Option<(Direction, RectPattern)>,
}

impl ValidationReport {
    pub fn extendable(&self) -> bool {
        self.extends_horizontally && self.extends_vertically
    }
}

/// Depth-bounded validation of an SFT: language nonemptiness by row transfer, and one-step
/// extendability of every admissible depth pattern.
pub fn validate_sft(spec: &SftSpec, depth: Shape, bound: u128) -> Result<ValidationReport> {
    let system = spec.system()?;
    validate_system(&system, depth, bound)
}

pub(crate) fn validate_system(
    system: &PatternSystem,
    depth: Shape,
    bound: u128,
) -> Result<ValidationReport> {
    let needed = system.window_bbox();
    if !needed.le(depth) {
        return Err(Error::DepthTooSmall { depth, needed });
    }
    let count = system.count(depth)?;
    if count == 0 {
        return Err(Error::EmptyLanguage { depth });
    }
    let patterns = system.enumerate(depth, bound)?;
    let mut report = ValidationReport {
        depth,
        pattern_count: count,
        nonempty: true,
        extends_horizontally: true,
        extends_vertically: true,
        stuck_pattern: None,
    };
    for dir in Direction::BOTH {
        let bigger = depth.add(dir.unit());
        if let Some(p) = patterns.iter().find(|p| !system.has_extension(p, bigger)) {
            match dir {
                Direction::Horizontal => report.extends_horizontally = false,
                Direction::Vertical => report.extends_vertically = false,
            }
            report.stuck_pattern.get_or_insert((dir, p.clone()));
        }
    }
    Ok(report)
}
