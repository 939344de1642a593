//! Experiment configuration files.
//!
//! ```toml
//! group = "Z"
//! ring = "Z"
//! element = "1 + t"
//! moments = 4
//! lambdas = [10, 100]
//! epsilons = [0.5, 0.1]
//! seed = 7
//!
//! [[families]]
//! kind = "torus"
//! schedule = [20, 200]
//!
//! [[families]]
//! kind = "perturbed"
//! epsilon = "1/n"
//! schedule = [20, 200]
//! ```

use std::ops::Range;
use std::path::PathBuf;

use adelic_core::group::{Family, GroupKind, GroupSpec};
use adelic_core::group_ring::GroupRingElement;
use adelic_core::group::Word;
use adelic_core::quasitile::Tile;
use adelic_core::{Rational, Ring, RingElement};
use num_bigint::BigInt;
use serde::Deserialize;
use toml::Spanned;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    group: Spanned<String>,
    #[serde(default)]
    ring: Option<Spanned<String>>,
    element: Spanned<RawElement>,
    families: Spanned<Vec<RawFamily>>,
    #[serde(default)]
    moments: Option<Spanned<u32>>,
    #[serde(default)]
    lambdas: Option<Spanned<Vec<f64>>>,
    #[serde(default)]
    epsilons: Option<Spanned<Vec<f64>>>,
    #[serde(default)]
    tiles: Option<Spanned<Vec<RawTile>>>,
    #[serde(default)]
    output: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawElement {
    Shorthand(String),
    Terms(Vec<RawTerm>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coeff: RawCoeff,
    #[serde(default)]
    word: String,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawCoeff {
    Int(i64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawTile {
    Side(usize),
    Box(Vec<usize>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    #[serde(default)]
    name: Option<String>,
    kind: Spanned<String>,
    schedule: Spanned<Vec<usize>>,
    #[serde(default)]
    base: Option<String>,
    #[serde(default)]
    epsilon: Option<Spanned<String>>,
    #[serde(default)]
    seed: Option<u64>,
}

/// How a family turns a schedule index into a sample family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyRecipe {
    Torus,
    Wreath,
    Perturbed { base: Box<FamilyRecipe>, epsilon: PerturbationRate, seed: u64 },
}

/// `ε` for perturbed families: fixed, or `k/n` at index `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PerturbationRate {
    Fixed(Rational),
    OverIndex(BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyPlan {
    pub name: String,
    pub schedule: Vec<usize>,
    pub recipe: FamilyRecipe,
}

impl FamilyPlan {
    pub fn family(&self, group: &GroupSpec, n: usize) -> Family {
        recipe_family(&self.recipe, group, n)
    }
}

fn recipe_family(recipe: &FamilyRecipe, group: &GroupSpec, n: usize) -> Family {
    match recipe {
        FamilyRecipe::Torus => {
            let d = match group.kind() {
                GroupKind::FreeAbelian(d) => *d,
                GroupKind::Lamplighter => 1,
            };
            Family::Torus(vec![n; d])
        }
        FamilyRecipe::Wreath => Family::WreathQuotient(n),
        FamilyRecipe::Perturbed { base, epsilon, seed } => Family::Perturbed {
            base: Box::new(recipe_family(base, group, n)),
            epsilon: match epsilon {
                PerturbationRate::Fixed(e) => e.clone(),
                PerturbationRate::OverIndex(k) => Rational::new(k.clone(), BigInt::from(n)),
            },
            seed: *seed,
        },
    }
}

/// A validated experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    pub ring: Ring,
    pub element: GroupRingElement,
    pub families: Vec<FamilyPlan>,
    pub moments: u32,
    pub lambdas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub tiles: Vec<Tile>,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

struct Located<'a> {
    text: &'a str,
}

impl Located<'_> {
    fn err(&self, span: Range<usize>, message: impl Into<String>) -> CliError {
        let line = self.text[..span.start.min(self.text.len())].matches('\n').count() + 1;
        CliError::Config { line: Some(line), message: message.into() }
    }
}

/// Parses `Z`, `Z^d` or `lamplighter`.
pub fn parse_group(s: &str) -> Option<GroupSpec> {
    match s.trim() {
        "Z" => GroupSpec::free_abelian(1).ok(),
        "lamplighter" | "Z2 wr Z" => Some(GroupSpec::lamplighter()),
        other => {
            let d: usize = other.strip_prefix("Z^")?.trim().parse().ok()?;
            GroupSpec::free_abelian(d).ok()
        }
    }
}

/// Exact rational from the shortest decimal rendering of `x`.
pub fn decimal_to_rational(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let text = format!("{x}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    Some(Rational::new(digits, BigInt::from(10u32).pow(frac.len() as u32)))
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(Rational::new(n.trim().parse().ok()?, d))
        }
        None => decimal_to_rational(s.parse().ok()?),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            CliError::Config { line, message: e.message().to_string() }
        })?;
        let at = Located { text };

        let group = parse_group(raw.group.get_ref())
            .ok_or_else(|| at.err(raw.group.span(), format!("unknown group `{}`", raw.group.get_ref())))?;
        let ring = match &raw.ring {
            None => Ring::Integers,
            Some(r) => r.get_ref().parse().map_err(|e: adelic_core::Error| at.err(r.span(), e.to_string()))?,
        };
        let element = build_element(raw.element.get_ref(), ring, &group)
            .map_err(|e| at.err(raw.element.span(), e.to_string()))?;
        if element.is_zero() {
            return Err(at.err(raw.element.span(), "the element must be nonzero"));
        }

        if raw.families.get_ref().is_empty() {
            return Err(at.err(raw.families.span(), "at least one family is required"));
        }
        let mut families = Vec::new();
        for f in raw.families.get_ref() {
            let schedule = f.schedule.get_ref().clone();
            if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) || schedule[0] == 0 {
                return Err(at.err(f.schedule.span(), "schedules must be nonempty, positive and strictly increasing"));
            }
            let base_kind = |k: &str| -> Option<FamilyRecipe> {
                match k {
                    "torus" => Some(FamilyRecipe::Torus),
                    "wreath" => Some(FamilyRecipe::Wreath),
                    _ => None,
                }
            };
            let kind = f.kind.get_ref().as_str();
            let recipe = match kind {
                "perturbed" => {
                    let base = f.base.as_deref().unwrap_or(match group.kind() {
                        GroupKind::Lamplighter => "wreath",
                        GroupKind::FreeAbelian(_) => "torus",
                    });
                    let base = base_kind(base)
                        .ok_or_else(|| at.err(f.kind.span(), format!("unknown base family `{base}`")))?;
                    let Some(eps) = &f.epsilon else {
                        return Err(at.err(f.kind.span(), "perturbed families need `epsilon`"));
                    };
                    let text = eps.get_ref().trim();
                    let rate = match text.strip_suffix("/n") {
                        Some(k) => k.trim().parse().ok().map(PerturbationRate::OverIndex),
                        None => parse_rational(text).map(PerturbationRate::Fixed),
                    }
                    .ok_or_else(|| at.err(eps.span(), format!("bad perturbation rate `{text}`")))?;
                    FamilyRecipe::Perturbed { base: Box::new(base), epsilon: rate, seed: f.seed.unwrap_or(raw.seed) }
                }
                other => base_kind(other).ok_or_else(|| at.err(f.kind.span(), format!("unknown family kind `{other}`")))?,
            };
            let wreath = matches!(&recipe, FamilyRecipe::Wreath)
                || matches!(&recipe, FamilyRecipe::Perturbed { base, .. } if **base == FamilyRecipe::Wreath);
            if wreath != matches!(group.kind(), GroupKind::Lamplighter) {
                return Err(at.err(f.kind.span(), "torus families need Z^d and wreath families need the lamplighter group"));
            }
            let name = f.name.clone().unwrap_or_else(|| kind.to_string());
            if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(at.err(f.kind.span(), format!("family name `{name}` must be alphanumeric")));
            }
            families.push(FamilyPlan { name, schedule, recipe });
        }
        // repeated names get a numeric suffix so CSV headers stay unique
        let mut seen = std::collections::BTreeMap::<String, usize>::new();
        for f in &mut families {
            let count = seen.entry(f.name.clone()).or_insert(0);
            *count += 1;
            if *count > 1 {
                f.name = format!("{}{}", f.name, count);
            }
        }

        let moments = match &raw.moments {
            None => 4,
            Some(m) if *m.get_ref() <= adelic_core::spectral::GROUP_MOMENT_MAX_POWER => *m.get_ref(),
            Some(m) => {
                return Err(at.err(
                    m.span(),
                    format!("moments are limited to {}", adelic_core::spectral::GROUP_MOMENT_MAX_POWER),
                ))
            }
        };
        let lambdas = match &raw.lambdas {
            None => vec![10.0, 100.0],
            Some(l) if l.get_ref().iter().all(|&v| v > 1.0) => l.get_ref().clone(),
            Some(l) => return Err(at.err(l.span(), "every lambda must exceed 1")),
        };
        let epsilons = match &raw.epsilons {
            None => vec![0.5, 0.1, 0.01],
            Some(e) if e.get_ref().iter().all(|&v| v > 0.0 && v < 1.0 && decimal_to_rational(v).is_some()) => {
                e.get_ref().clone()
            }
            Some(e) => return Err(at.err(e.span(), "every epsilon must lie in (0, 1)")),
        };
        let tiles = match &raw.tiles {
            None => Vec::new(),
            Some(t) => {
                let d = match group.kind() {
                    GroupKind::FreeAbelian(d) => *d,
                    GroupKind::Lamplighter => return Err(at.err(t.span(), "tiles need a free abelian group")),
                };
                t.get_ref()
                    .iter()
                    .map(|tile| match tile {
                        RawTile::Side(s) => Tile::boxed(&vec![*s; d]),
                        RawTile::Box(sides) if sides.len() == d => Tile::boxed(sides),
                        RawTile::Box(_) => Err(adelic_core::Error::Input(format!("box tiles need {d} sides"))),
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| at.err(t.span(), e.to_string()))?
            }
        };
        Ok(ExperimentConfig {
            group,
            ring,
            element,
            families,
            moments,
            lambdas,
            epsilons,
            tiles,
            output: raw.output,
            seed: raw.seed,
        })
    }
}

fn build_element(raw: &RawElement, ring: Ring, group: &GroupSpec) -> adelic_core::Result<GroupRingElement> {
    match raw {
        RawElement::Shorthand(s) => GroupRingElement::parse(s, ring, group),
        RawElement::Terms(terms) => {
            let mut out = Vec::with_capacity(terms.len());
            for t in terms {
                let c = match &t.coeff {
                    RawCoeff::Int(v) => RingElement::from_int(ring, *v),
                    RawCoeff::Text(s) => RingElement::parse_in(s, ring)?,
                };
                out.push((Word::parse(&t.word, group)?, c));
            }
            let mut a = GroupRingElement::zero(ring);
            for (w, c) in out {
                a = a.try_add(&GroupRingElement::monomial(w, c))?;
            }
            Ok(a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
group = "Z"
element = "1 + t"
seed = 3

[[families]]
kind = "torus"
schedule = [4, 8]

[[families]]
kind = "perturbed"
epsilon = "1/n"
schedule = [4, 8]
"#;

    #[test]
    fn parses_defaults() {
        let c = ExperimentConfig::parse(BASIC).unwrap();
        assert_eq!(c.ring, Ring::Integers);
        assert_eq!(c.families.len(), 2);
        assert_eq!(c.moments, 4);
        assert_eq!(c.lambdas, vec![10.0, 100.0]);
        assert_eq!(c.families[1].family(&c.group, 8).label(), "perturbed(torus(8),1/8,3)");
    }

    #[test]
    fn term_list_elements() {
        let text = BASIC.replace(
            r#"element = "1 + t""#,
            r#"element = [{ coeff = 1, word = "" }, { coeff = "1", word = "t" }]"#,
        );
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.element, ExperimentConfig::parse(BASIC).unwrap().element);
    }

    #[test]
    fn errors_carry_lines() {
        let bad = BASIC.replace("schedule = [4, 8]\n\n[[families]]", "schedule = [8, 4]\n\n[[families]]");
        match ExperimentConfig::parse(&bad) {
            Err(CliError::Config { line: Some(8), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match ExperimentConfig::parse("group = \"Z\"\nelement = 1 +") {
            Err(CliError::Config { line: Some(2), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let wrong_group = BASIC.replace(r#"group = "Z""#, r#"group = "lamplighter""#);
        assert!(ExperimentConfig::parse(&wrong_group).is_err());
    }

    #[test]
    fn duplicate_names_are_suffixed() {
        let text = BASIC.replace("kind = \"perturbed\"\nepsilon = \"1/n\"", "kind = \"torus\"");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.families[0].name, "torus");
        assert_eq!(c.families[1].name, "torus2");
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(decimal_to_rational(0.1).unwrap(), Rational::new(1.into(), 10.into()));
        assert_eq!(decimal_to_rational(0.25).unwrap(), Rational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("3/12").unwrap(), Rational::new(1.into(), 4.into()));
    }
}
