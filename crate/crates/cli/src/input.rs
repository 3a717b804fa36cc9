//! Resolving command-line references to documents: `preset:NAME[:c=V]`,
//! prior keywords, or JSON files.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use nlgame::presets::{self, Preset};
use nlgame::{parse_scalar, Behavior, Game, Prior, QuadExt, Scenario};
use serde::de::DeserializeOwned;

/// `preset:NAME` or `preset:NAME:c=V`.
fn parse_preset_ref(reference: &str) -> Result<Option<(String, Option<QuadExt>)>> {
    let Some(rest) = reference.strip_prefix("preset:") else {
        return Ok(None);
    };
    let mut parts = rest.splitn(2, ':');
    let name = parts.next().unwrap_or_default().to_owned();
    let c = match parts.next() {
        None => None,
        Some(param) => {
            let value = param
                .strip_prefix("c=")
                .ok_or_else(|| anyhow!("preset parameter must look like c=V, got {param:?}"))?;
            Some(parse_scalar(value)?)
        }
    };
    Ok(Some((name, c)))
}

pub fn load_preset(name: &str, c: Option<&QuadExt>) -> Result<Preset> {
    Ok(presets::preset(name, c)?)
}

fn read_json<T: DeserializeOwned>(path: &str) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
    serde_json::from_str(&text).map_err(|e| nlgame::Error::from(e).into())
}

fn resolve<T: DeserializeOwned>(
    reference: &str,
    what: &str,
    pick: impl FnOnce(Preset) -> Option<T>,
) -> Result<T> {
    match parse_preset_ref(reference)? {
        Some((name, c)) => {
            let preset = load_preset(&name, c.as_ref())?;
            let kind = preset.kind();
            pick(preset).ok_or_else(|| anyhow!("preset {name} is a {kind}, expected a {what}"))
        }
        None => read_json(reference),
    }
}

pub fn game(reference: &str) -> Result<Game> {
    resolve(reference, "game", |p| match p {
        Preset::Game(g) => Some(g),
        _ => None,
    })
}

pub fn behavior(reference: &str) -> Result<Behavior> {
    resolve(reference, "behavior", |p| match p {
        Preset::Behavior(b) => Some(b),
        _ => None,
    })
}

/// A scenario file, or the scenario of any game or behavior reference.
pub fn scenario(reference: &str) -> Result<Scenario> {
    if reference.starts_with("preset:") {
        return resolve(reference, "game or behavior", |p| match p {
            Preset::Game(g) => Some(g.scenario().clone()),
            Preset::Behavior(b) => Some(b.scenario().clone()),
            _ => None,
        });
    }
    let value: serde_json::Value = read_json(reference)?;
    let doc = value.get("scenario").cloned().unwrap_or(value);
    serde_json::from_value(doc).map_err(|e| nlgame::Error::from(e).into())
}

/// `uniform`, `unit`, a prior preset, or a prior file.
pub fn prior(reference: &str, scenario: &Scenario) -> Result<Prior> {
    let prior = match reference {
        "uniform" => Prior::uniform(scenario),
        "unit" => Prior::unit(scenario),
        _ => resolve(reference, "prior", |p| match p {
            Preset::Prior(w) => Some(w),
            _ => None,
        })?,
    };
    prior.check_scenario(scenario)?;
    Ok(prior)
}

pub fn ensure_same(expected: &Scenario, got: &Scenario, what: &str) -> Result<()> {
    if expected != got {
        bail!(nlgame::Error::ScenarioMismatch(format!(
            "{what} does not match the scenario"
        )));
    }
    Ok(())
}
