//! Deterministic 20-year techno-economic model of a small district-heating
//! system.
//!
//! Three design options differ in which technology serves the baseload and
//! seasonal halves of annual heat demand: a gas-fired CHP unit, an electric
//! heat pump, or a mix. A scenario bundles the exogenous assumptions (carbon
//! penalty, demand growth, fuel price trajectories); the remaining inputs are
//! varied over discrete low/medium/high levels by the experiment layer. Each
//! run yields a net present cost in mln € and total CO₂-equivalent emissions
//! in Mton over the fixed horizon.
//!
//! The model is closed-form: dispatch is rule-based per design (no
//! optimisation), and every operation is pure, so identical inputs give
//! bit-identical outputs.
//!
//! Unit conventions follow the source tables: energy in MWh, prices in €/MWh,
//! operating costs in mln €/a, emission factors in Mton/MWh (adopted verbatim
//! from the source data despite the unusually large magnitude).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed planning horizon in years (years 0..=19).
pub const HORIZON_YEARS: usize = 20;

// ── Levels ──────────────────────────────────────────────────────────────────

/// Discrete setting of one experimental input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Low,
    Med,
    High,
}

impl Level {
    /// Enumeration order used everywhere: Low < Med < High.
    pub const ALL: [Level; 3] = [Level::Low, Level::Med, Level::High];

    pub fn name(&self) -> &'static str {
        match self {
            Level::Low => "low",
            Level::Med => "med",
            Level::High => "high",
        }
    }
}

/// A scalar input with one value per level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelValues {
    pub low: f64,
    pub med: f64,
    pub high: f64,
}

impl LevelValues {
    pub fn value(&self, level: Level) -> f64 {
        match level {
            Level::Low => self.low,
            Level::Med => self.med,
            Level::High => self.high,
        }
    }
}

/// A per-year input trajectory with one value per level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelTrajectories {
    pub low: Vec<f64>,
    pub med: Vec<f64>,
    pub high: Vec<f64>,
}

impl LevelTrajectories {
    pub fn trajectory(&self, level: Level) -> &[f64] {
        match level {
            Level::Low => &self.low,
            Level::Med => &self.med,
            Level::High => &self.high,
        }
    }
}

// ── Designs ─────────────────────────────────────────────────────────────────

/// The three candidate system designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignOption {
    /// CHP serves both baseload and seasonal demand.
    D1,
    /// Heat pump serves baseload, CHP serves seasonal demand.
    D2,
    /// Heat pump (with storage as a capital line item) serves all demand.
    D3,
}

impl DesignOption {
    pub const ALL: [DesignOption; 3] = [DesignOption::D1, DesignOption::D2, DesignOption::D3];

    pub fn name(&self) -> &'static str {
        match self {
            DesignOption::D1 => "d1",
            DesignOption::D2 => "d2",
            DesignOption::D3 => "d3",
        }
    }

    pub fn parse(s: &str) -> Option<DesignOption> {
        match s.to_ascii_lowercase().as_str() {
            "d1" | "1" => Some(DesignOption::D1),
            "d2" | "2" => Some(DesignOption::D2),
            "d3" | "3" => Some(DesignOption::D3),
            _ => None,
        }
    }

    /// Technologies carrying a fixed operating cost: the CHP unit and the
    /// heat pump. D3's storage has no operating cost line.
    pub fn om_technology_count(&self) -> usize {
        match self {
            DesignOption::D1 | DesignOption::D3 => 1,
            DesignOption::D2 => 2,
        }
    }
}

// ── Scenarios ───────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Green,
    Neutral,
    Market,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [
        ScenarioKind::Green,
        ScenarioKind::Neutral,
        ScenarioKind::Market,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Green => "green",
            ScenarioKind::Neutral => "neutral",
            ScenarioKind::Market => "market",
        }
    }

    pub fn parse(s: &str) -> Option<ScenarioKind> {
        match s.to_ascii_lowercase().as_str() {
            "green" => Some(ScenarioKind::Green),
            "neutral" => Some(ScenarioKind::Neutral),
            "market" => Some(ScenarioKind::Market),
            _ => None,
        }
    }
}

/// Exogenous assumptions for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// € per Mton of CO₂-equivalent emissions.
    pub carbon_penalty_eur_per_mton: f64,
    /// Annual fractional change in both demand components.
    pub demand_growth: f64,
    /// €/MWh, one entry per year of the horizon.
    pub elec_price_eur_per_mwh: Vec<f64>,
    /// €/MWh, one entry per year of the horizon.
    pub gas_price_eur_per_mwh: Vec<f64>,
}

impl Scenario {
    pub fn new(
        kind: ScenarioKind,
        carbon_penalty_eur_per_mton: f64,
        demand_growth: f64,
        elec_price_eur_per_mwh: Vec<f64>,
        gas_price_eur_per_mwh: Vec<f64>,
    ) -> Result<Self> {
        let s = Scenario {
            kind,
            carbon_penalty_eur_per_mton,
            demand_growth,
            elec_price_eur_per_mwh,
            gas_price_eur_per_mwh,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, t: &[f64]| -> Result<()> {
            if t.len() != HORIZON_YEARS {
                return Err(Error::config(
                    format!("scenario.{}.{name}", self.kind.name()),
                    format!("expected {HORIZON_YEARS} yearly values, got {}", t.len()),
                ));
            }
            if t.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(Error::config(
                    format!("scenario.{}.{name}", self.kind.name()),
                    "prices must be strictly positive and finite",
                ));
            }
            Ok(())
        };
        check("elec_price_eur_per_mwh", &self.elec_price_eur_per_mwh)?;
        check("gas_price_eur_per_mwh", &self.gas_price_eur_per_mwh)?;
        if !self.carbon_penalty_eur_per_mton.is_finite() || self.carbon_penalty_eur_per_mton < 0.0 {
            return Err(Error::config(
                format!("scenario.{}.carbon_penalty_eur_per_mton", self.kind.name()),
                "must be finite and nonnegative",
            ));
        }
        if !self.demand_growth.is_finite() || self.demand_growth <= -1.0 {
            return Err(Error::config(
                format!("scenario.{}.demand_growth", self.kind.name()),
                "must be finite and greater than -1",
            ));
        }
        Ok(())
    }
}

// ── Fixed technology parameters ─────────────────────────────────────────────

/// Up-front investment per design, mln €, booked in year 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapitalCosts {
    pub d1_mln_eur: f64,
    pub d2_mln_eur: f64,
    pub d3_mln_eur: f64,
}

impl CapitalCosts {
    pub fn for_design(&self, design: DesignOption) -> f64 {
        match design {
            DesignOption::D1 => self.d1_mln_eur,
            DesignOption::D2 => self.d2_mln_eur,
            DesignOption::D3 => self.d3_mln_eur,
        }
    }
}

/// Parameters held fixed across the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TechnologyParams {
    /// Heat output per unit of gas fuel for the CHP, in (0, 1].
    pub chp_heat_efficiency: f64,
    /// CO₂-equivalence weight applied to the CHP NOx factor.
    pub nox_co2_weight: f64,
    pub capital_costs: CapitalCosts,
}

impl TechnologyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.chp_heat_efficiency > 0.0 && self.chp_heat_efficiency <= 1.0) {
            return Err(Error::config(
                "technology.chp_heat_efficiency",
                "must lie in (0, 1]",
            ));
        }
        if !self.nox_co2_weight.is_finite() || self.nox_co2_weight < 0.0 {
            return Err(Error::config(
                "technology.nox_co2_weight",
                "must be finite and nonnegative",
            ));
        }
        for (key, v) in [
            (
                "technology.capital_costs.d1_mln_eur",
                self.capital_costs.d1_mln_eur,
            ),
            (
                "technology.capital_costs.d2_mln_eur",
                self.capital_costs.d2_mln_eur,
            ),
            (
                "technology.capital_costs.d3_mln_eur",
                self.capital_costs.d3_mln_eur,
            ),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(key, "must be finite and nonnegative"));
            }
        }
        Ok(())
    }
}

// ── Varied inputs, resolved to one level combination ────────────────────────

/// Emission activity factors at a single level, Mton per MWh of activity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmissionFactors {
    /// Per MWh of CHP gas fuel.
    pub chp_co2: f64,
    /// Per MWh of CHP gas fuel (NOx, weighted into CO₂-equivalent).
    pub chp_nox: f64,
    /// Per MWh of heat-pump electricity.
    pub hp_co2: f64,
    /// Per MWh of imported gas.
    pub gas_import_co2: f64,
}

/// The four varied inputs, each resolved to a concrete level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputLevels {
    /// Fixed operating cost per technology, mln € per year of the horizon.
    pub operational_cost_mln_eur: Vec<f64>,
    pub discount_rate: f64,
    pub cop_heat_pump: f64,
    pub emission_factors: EmissionFactors,
}

impl InputLevels {
    pub fn validate(&self) -> Result<()> {
        if self.operational_cost_mln_eur.len() != HORIZON_YEARS {
            return Err(Error::config(
                "levels.operational_cost_mln_eur",
                format!(
                    "expected {HORIZON_YEARS} yearly values, got {}",
                    self.operational_cost_mln_eur.len()
                ),
            ));
        }
        if self
            .operational_cost_mln_eur
            .iter()
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::config(
                "levels.operational_cost_mln_eur",
                "values must be finite and nonnegative",
            ));
        }
        if !self.discount_rate.is_finite() || self.discount_rate < 0.0 {
            return Err(Error::NegativeDiscountRate(self.discount_rate));
        }
        if self.cop_heat_pump.is_nan() || self.cop_heat_pump <= 1.0 {
            return Err(Error::config("levels.cop_heat_pump", "must exceed 1"));
        }
        let ef = &self.emission_factors;
        for (key, v) in [
            ("levels.emission_factors.chp_co2", ef.chp_co2),
            ("levels.emission_factors.chp_nox", ef.chp_nox),
            ("levels.emission_factors.hp_co2", ef.hp_co2),
            ("levels.emission_factors.gas_import_co2", ef.gas_import_co2),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::config(key, "must be finite and nonnegative"));
            }
        }
        Ok(())
    }
}

// ── Level tables for the varied inputs ──────────────────────────────────────

/// Emission activity factors at all three levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionFactorLevels {
    pub chp_co2: LevelValues,
    pub chp_nox: LevelValues,
    pub hp_co2: LevelValues,
    pub gas_import_co2: LevelValues,
}

/// The four varied inputs with their full low/med/high tables. One level per
/// input is selected for each run; the emission-factor level switches all
/// four activity factors jointly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorLevels {
    pub operational_cost_mln_eur: LevelTrajectories,
    pub discount_rate: LevelValues,
    pub cop_heat_pump: LevelValues,
    pub emission_factors: EmissionFactorLevels,
}

/// A concrete level choice for each varied input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LevelSelection {
    pub operational_cost: Level,
    pub discount_rate: Level,
    pub cop: Level,
    pub emission_factor: Level,
}

impl FactorLevels {
    pub fn resolve(&self, sel: LevelSelection) -> InputLevels {
        let ef = &self.emission_factors;
        InputLevels {
            operational_cost_mln_eur: self
                .operational_cost_mln_eur
                .trajectory(sel.operational_cost)
                .to_vec(),
            discount_rate: self.discount_rate.value(sel.discount_rate),
            cop_heat_pump: self.cop_heat_pump.value(sel.cop),
            emission_factors: EmissionFactors {
                chp_co2: ef.chp_co2.value(sel.emission_factor),
                chp_nox: ef.chp_nox.value(sel.emission_factor),
                hp_co2: ef.hp_co2.value(sel.emission_factor),
                gas_import_co2: ef.gas_import_co2.value(sel.emission_factor),
            },
        }
    }

    /// Validates every level of every input by resolving all 3⁴ selections.
    pub fn validate(&self) -> Result<()> {
        for oc in Level::ALL {
            for dr in Level::ALL {
                for cop in Level::ALL {
                    for ef in Level::ALL {
                        self.resolve(LevelSelection {
                            operational_cost: oc,
                            discount_rate: dr,
                            cop,
                            emission_factor: ef,
                        })
                        .validate()?;
                    }
                }
            }
        }
        Ok(())
    }
}

// ── Demand and dispatch ─────────────────────────────────────────────────────

/// Annual heat demand split, MWh per year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseDemand {
    pub baseload_mwh: f64,
    pub seasonal_mwh: f64,
}

impl BaseDemand {
    pub fn validate(&self) -> Result<()> {
        if !self.baseload_mwh.is_finite() || !self.seasonal_mwh.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        if self.baseload_mwh < 0.0 || self.seasonal_mwh < 0.0 {
            return Err(Error::NegativeDemand);
        }
        Ok(())
    }
}

/// Heat served by each technology in one year, MWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Allocation {
    pub design: DesignOption,
    pub chp_heat_mwh: f64,
    pub hp_heat_mwh: f64,
}

/// Demand in `year`, compounding the scenario's growth rate from the base.
pub fn annual_demand(year: usize, scenario: &Scenario, base: BaseDemand) -> Result<BaseDemand> {
    if year >= HORIZON_YEARS {
        return Err(Error::YearOutOfRange {
            year,
            horizon: HORIZON_YEARS,
        });
    }
    base.validate()?;
    let factor = (1.0 + scenario.demand_growth).powi(year as i32);
    Ok(BaseDemand {
        baseload_mwh: base.baseload_mwh * factor,
        seasonal_mwh: base.seasonal_mwh * factor,
    })
}

/// Rule-based technology assignment. Conservation is exact: the allocated
/// components are the demand components themselves, not re-derived sums.
pub fn dispatch(design: DesignOption, demand: BaseDemand) -> Result<Allocation> {
    demand.validate()?;
    let (chp, hp) = match design {
        DesignOption::D1 => (demand.baseload_mwh + demand.seasonal_mwh, 0.0),
        DesignOption::D2 => (demand.seasonal_mwh, demand.baseload_mwh),
        DesignOption::D3 => (0.0, demand.baseload_mwh + demand.seasonal_mwh),
    };
    Ok(Allocation {
        design,
        chp_heat_mwh: chp,
        hp_heat_mwh: hp,
    })
}

fn chp_fuel_mwh(alloc: &Allocation, tech: &TechnologyParams) -> f64 {
    alloc.chp_heat_mwh / tech.chp_heat_efficiency
}

fn hp_electricity_mwh(alloc: &Allocation, levels: &InputLevels) -> f64 {
    alloc.hp_heat_mwh / levels.cop_heat_pump
}

/// CO₂-equivalent emissions for one year, Mton. Gas import activity equals
/// the CHP fuel burn, so the gas-import factor rides on the same term.
pub fn annual_emissions(alloc: &Allocation, levels: &InputLevels, tech: &TechnologyParams) -> f64 {
    let fuel = chp_fuel_mwh(alloc, tech);
    let elec = hp_electricity_mwh(alloc, levels);
    let ef = &levels.emission_factors;
    fuel * (ef.chp_co2 + tech.nox_co2_weight * ef.chp_nox + ef.gas_import_co2) + elec * ef.hp_co2
}

/// Undiscounted cost for one year, €: fuel, electricity, fixed operating
/// costs, the carbon penalty, and (in year 0 only) the design's capital cost.
pub fn annual_cost(
    alloc: &Allocation,
    year: usize,
    scenario: &Scenario,
    levels: &InputLevels,
    tech: &TechnologyParams,
) -> Result<f64> {
    if year >= HORIZON_YEARS {
        return Err(Error::YearOutOfRange {
            year,
            horizon: HORIZON_YEARS,
        });
    }
    let fuel_cost = chp_fuel_mwh(alloc, tech) * scenario.gas_price_eur_per_mwh[year];
    let elec_cost = hp_electricity_mwh(alloc, levels) * scenario.elec_price_eur_per_mwh[year];
    let om_cost =
        levels.operational_cost_mln_eur[year] * 1e6 * alloc.design.om_technology_count() as f64;
    let penalty = scenario.carbon_penalty_eur_per_mton * annual_emissions(alloc, levels, tech);
    let capital = if year == 0 {
        tech.capital_costs.for_design(alloc.design) * 1e6
    } else {
        0.0
    };
    Ok(fuel_cost + elec_cost + om_cost + penalty + capital)
}

/// Net present cost of a full-horizon cost stream, mln €.
pub fn npc(per_year_costs_eur: &[f64], discount_rate: f64) -> Result<f64> {
    if per_year_costs_eur.len() != HORIZON_YEARS {
        return Err(Error::DimensionMismatch {
            expected: HORIZON_YEARS,
            got: per_year_costs_eur.len(),
        });
    }
    if !discount_rate.is_finite() || discount_rate < 0.0 {
        return Err(Error::NegativeDiscountRate(discount_rate));
    }
    let total: f64 = per_year_costs_eur
        .iter()
        .enumerate()
        .map(|(y, c)| c / (1.0 + discount_rate).powi(y as i32))
        .sum();
    Ok(total / 1e6)
}

// ── Simulation ──────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YearRecord {
    pub year: usize,
    pub discounted_cost_eur: f64,
    pub emissions_mton: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub npc_mln_eur: f64,
    pub emissions_mton: f64,
    pub per_year: Vec<YearRecord>,
}

/// Runs the full horizon for one (design, scenario, level combination) cell.
pub fn simulate(
    design: DesignOption,
    scenario: &Scenario,
    levels: &InputLevels,
    tech: &TechnologyParams,
    base: BaseDemand,
) -> Result<SimulationResult> {
    scenario.validate()?;
    levels.validate()?;
    tech.validate()?;
    base.validate()?;
    let mut costs = Vec::with_capacity(HORIZON_YEARS);
    let mut per_year = Vec::with_capacity(HORIZON_YEARS);
    let mut emissions_total = 0.0;
    for year in 0..HORIZON_YEARS {
        let demand = annual_demand(year, scenario, base)?;
        let alloc = dispatch(design, demand)?;
        let cost = annual_cost(&alloc, year, scenario, levels, tech)?;
        let emissions = annual_emissions(&alloc, levels, tech);
        let discounted = cost / (1.0 + levels.discount_rate).powi(year as i32);
        costs.push(cost);
        emissions_total += emissions;
        per_year.push(YearRecord {
            year,
            discounted_cost_eur: discounted,
            emissions_mton: emissions,
        });
    }
    Ok(SimulationResult {
        npc_mln_eur: npc(&costs, levels.discount_rate)?,
        emissions_mton: emissions_total,
        per_year,
    })
}
