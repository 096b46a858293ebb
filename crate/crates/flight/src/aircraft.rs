use thiserror::Error;

/// Flight level index, starting at 1.
pub type Level = u16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LevelTableError {
    #[error("level table is empty")]
    Empty,
    #[error("altitudes must be strictly increasing (level {0})")]
    NotIncreasing(Level),
    #[error("optimal level {0} is outside 1..={1}")]
    OptimalOutOfRange(Level, Level),
}

/// Cruise altitudes indexed by level, and the consumption-optimal level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTable {
    altitudes: Vec<f64>,
    optimal: Level,
}

impl LevelTable {
    pub fn new(altitudes: Vec<f64>, optimal: Level) -> Result<Self, LevelTableError> {
        if altitudes.is_empty() {
            return Err(LevelTableError::Empty);
        }
        if let Some(i) = altitudes.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(LevelTableError::NotIncreasing(i as Level + 2));
        }
        let top = altitudes.len() as Level;
        if optimal == 0 || optimal > top {
            return Err(LevelTableError::OptimalOutOfRange(optimal, top));
        }
        Ok(LevelTable { altitudes, optimal })
    }

    /// Evenly spaced levels from `low` to `high` metres, optimal at the top.
    pub fn linear(count: Level, low: f64, high: f64) -> Result<Self, LevelTableError> {
        let step = if count > 1 { (high - low) / (count - 1) as f64 } else { 0.0 };
        Self::new((0..count).map(|i| low + step * i as f64).collect(), count)
    }

    /// 181 levels from 1100 m to 11300 m, optimal level 181.
    pub fn standard() -> Self {
        Self::linear(181, 1100.0, 11300.0).expect("valid default table")
    }

    pub fn len(&self) -> Level {
        self.altitudes.len() as Level
    }

    pub fn is_empty(&self) -> bool {
        self.altitudes.is_empty()
    }

    pub fn levels(&self) -> impl Iterator<Item = Level> {
        1..=self.len()
    }

    pub fn optimal(&self) -> Level {
        self.optimal
    }

    pub fn contains(&self, level: Level) -> bool {
        level >= 1 && level <= self.len()
    }

    /// Altitude in metres.
    pub fn altitude(&self, level: Level) -> f64 {
        self.altitudes[level as usize - 1]
    }

    pub fn altitude_difference(&self, a: Level, b: Level) -> f64 {
        (self.altitude(a) - self.altitude(b)).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelChange {
    /// Horizontal distance in metres until top of climb (or bottom of descent).
    Allowed { toc_m: f64 },
    Forbidden,
}

/// Consumption and duration of traversing one 3-D arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcCost {
    pub consumption_kg: f64,
    pub duration_s: f64,
}

/// Constant-speed aircraft with a fixed vertical rate and an exponential
/// penalty for cruising away from the optimal level.
#[derive(Debug, Clone, PartialEq)]
pub struct Aircraft {
    /// True airspeed, m/s.
    pub speed: f64,
    /// Climb and descent rate, m/s.
    pub vertical_rate: f64,
    /// Consumption at the optimal level, kg/km.
    pub consumption_per_km: f64,
    pub level_penalty_base: f64,
}

impl Default for Aircraft {
    fn default() -> Self {
        Aircraft {
            speed: 240.1,
            vertical_rate: 12.7,
            consumption_per_km: 6.0,
            level_penalty_base: 1.01,
        }
    }
}

impl Aircraft {
    pub fn is_valid(&self) -> bool {
        0.0 < self.vertical_rate
            && self.vertical_rate < self.speed
            && self.consumption_per_km > 0.0
            && self.level_penalty_base >= 1.0
    }

    /// Ground speed while climbing or descending.
    pub fn projected_speed(&self) -> f64 {
        (self.speed * self.speed - self.vertical_rate * self.vertical_rate).sqrt()
    }

    pub fn cruise_duration_s(&self, d_km: f64) -> f64 {
        1e3 * d_km / self.speed
    }

    fn penalty(&self, exponent: f64) -> f64 {
        self.level_penalty_base.powf(exponent)
    }

    pub fn cruise_consumption_kg(&self, levels: &LevelTable, d_km: f64, level: Level) -> f64 {
        let exponent = (levels.optimal() as f64 - level as f64).abs();
        d_km * self.consumption_per_km * self.penalty(exponent)
    }

    /// Whether the altitude change between `from` and `to` fits into `d_m`
    /// metres of ground track.
    pub fn climb_feasible(&self, levels: &LevelTable, d_m: f64, from: Level, to: Level) -> LevelChange {
        let toc_m = self.projected_speed() * levels.altitude_difference(from, to) / self.vertical_rate;
        if toc_m <= d_m {
            LevelChange::Allowed { toc_m }
        } else {
            LevelChange::Forbidden
        }
    }

    /// Cost of flying a segment of `d_km` from level `from` to level `to`,
    /// or `None` if the level change does not fit.
    pub fn arc_cost(&self, levels: &LevelTable, d_km: f64, from: Level, to: Level) -> Option<ArcCost> {
        if from == to {
            return Some(ArcCost {
                consumption_kg: self.cruise_consumption_kg(levels, d_km, from),
                duration_s: self.cruise_duration_s(d_km),
            });
        }
        let d_m = 1e3 * d_km;
        let LevelChange::Allowed { toc_m } = self.climb_feasible(levels, d_m, from, to) else {
            return None;
        };
        let rest_km = (d_m - toc_m).max(0.0) / 1e3;
        let duration_s = levels.altitude_difference(from, to) / self.vertical_rate + self.cruise_duration_s(rest_km);
        let consumption_kg = if to > from {
            let mid = (from as f64 + to as f64) / 2.0;
            let exponent = (levels.optimal() as f64 - mid).abs();
            toc_m / 1e3 * self.consumption_per_km * self.penalty(exponent)
                + self.cruise_consumption_kg(levels, rest_km, to)
        } else {
            self.cruise_consumption_kg(levels, d_km, from)
        };
        Some(ArcCost {
            consumption_kg,
            duration_s,
        })
    }

    /// Lower bound on the fuel needed to cover `gcd_km`.
    pub fn heuristic_kg(&self, gcd_km: f64) -> f64 {
        self.consumption_per_km * gcd_km
    }
}
