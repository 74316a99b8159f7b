//! JSON configuration documents.

use crate::error::{Error, Result};
use crate::game::{GameSpec, Mode, QuadraticPayoff, Sensitivities};
use crate::linalg::Mat2;
use crate::simulate::SimConfig;
use crate::stability::AnalysisOptions;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDoc {
    /// Row-major.
    #[serde(rename = "A1")]
    pub a1: [f64; 4],
    #[serde(rename = "A2")]
    pub a2: [f64; 4],
    pub b1: [f64; 2],
    pub b2: [f64; 2],
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginal_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDoc {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// A published or expected eigenvalue pair for one mode, `[[re, im], [re, im]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceEigen {
    pub mode: Mode,
    pub values: [[f64; 2]; 2],
}

/// Reference values the report compares against; mismatches become warnings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceDoc {
    #[serde(default)]
    pub eigenvalues: Vec<ReferenceEigen>,
    /// Allowed distance per eigenvalue; defaults to 0.05.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// Raster bounds for the domain export; `n` points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::DegenerateGrid(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if ![self.xmin, self.xmax, self.ymin, self.ymax].iter().all(|v| v.is_finite()) {
            return bad("bounds must be finite".into());
        }
        if !(self.xmin < self.xmax) || !(self.ymin < self.ymax) {
            return bad("bounds must satisfy xmin < xmax and ymin < ymax".into());
        }
        Ok(())
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        let n = self.n;
        let at = move |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        (0..n).flat_map(move |j| (0..n).map(move |i| [at(self.xmin, self.xmax, i), at(self.ymin, self.ymax, j)]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub game: GameDoc,
    pub alphas: Sensitivities,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceDoc>,
}

impl ConfigDoc {
    pub fn from_game(game: &GameSpec) -> Self {
        Self {
            game: GameDoc {
                a1: game.payoff1.a.to_row_major(),
                a2: game.payoff2.a.to_row_major(),
                b1: game.payoff1.b,
                b2: game.payoff2.b,
                c1: game.payoff1.c,
                c2: game.payoff2.c,
            },
            alphas: game.alphas,
            sim: None,
            analysis: None,
            sweep: None,
            grid: None,
            reference: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config { path: if path == "." { "$".into() } else { path }, message: e.into_inner().to_string() }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The validated game.
    pub fn game_spec(&self) -> Result<GameSpec> {
        let g = &self.game;
        let game = GameSpec::new_unchecked(
            QuadraticPayoff::new(Mat2::from_row_major(g.a1), g.b1, g.c1),
            QuadraticPayoff::new(Mat2::from_row_major(g.a2), g.b2, g.c2),
            self.alphas,
        );
        game.validate()?;
        Ok(game)
    }

    pub fn analysis_options(&self) -> AnalysisOptions {
        let d = AnalysisOptions::default();
        let a = self.analysis.unwrap_or_default();
        AnalysisOptions {
            case_tol: a.case_tol.unwrap_or(d.case_tol),
            panel_tol: a.panel_tol.unwrap_or(d.panel_tol),
            marginal_tol: a.marginal_tol,
        }
    }

    /// Copy with one scalar replaced. Off-diagonal matrix entries set both
    /// `[1]` and `[2]` so the matrix stays symmetric.
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<ConfigDoc> {
        let mut doc = self.clone();
        let unknown = || Error::UnknownParameter(path.to_string());
        let p = path.strip_prefix("alphas.").unwrap_or(path);
        match p {
            "a1_low" => doc.alphas.a1_low = value,
            "a1_high" => doc.alphas.a1_high = value,
            "a2_low" => doc.alphas.a2_low = value,
            "a2_high" => doc.alphas.a2_high = value,
            "game.c1" | "c1" => doc.game.c1 = value,
            "game.c2" | "c2" => doc.game.c2 = value,
            _ => {
                let (name, index) = parse_indexed(p).ok_or_else(unknown)?;
                match name {
                    "game.A1" | "game.A2" if index < 4 => {
                        let m = if name == "game.A1" { &mut doc.game.a1 } else { &mut doc.game.a2 };
                        m[index] = value;
                        if index == 1 || index == 2 {
                            m[3 - index] = value;
                        }
                    }
                    "game.b1" if index < 2 => doc.game.b1[index] = value,
                    "game.b2" if index < 2 => doc.game.b2[index] = value,
                    _ => return Err(unknown()),
                }
            }
        }
        Ok(doc)
    }
}

/// `game.A1[2]` → `("game.A1", 2)`; shorthand `b1_2` → `("game.b1", 1)`.
fn parse_indexed(p: &str) -> Option<(&'static str, usize)> {
    let canonical = |name: &str| -> Option<&'static str> {
        ["game.A1", "game.A2", "game.b1", "game.b2"].into_iter().find(|c| *c == name)
    };
    if let Some(open) = p.find('[') {
        let idx: usize = p.strip_suffix(']')?[open + 1..].parse().ok()?;
        return Some((canonical(&p[..open])?, idx));
    }
    let (vec, comp) = p.split_once('_')?;
    let name = match vec {
        "b1" => "game.b1",
        "b2" => "game.b2",
        _ => return None,
    };
    let c: usize = comp.parse().ok()?;
    (1..=2).contains(&c).then_some((name, c - 1))
}
