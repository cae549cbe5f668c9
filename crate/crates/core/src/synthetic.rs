//! Seeded synthetic year of load, wind and solar.
//!
//! Load carries a summer peak and a smaller winter bump, a diurnal cycle
//! whose evening peak moves with the season, and lower weekends. Solar is a
//! clear-sky bell scaled by day length and a persistent daily cloudiness.
//! Wind is a logistic transform of an hourly AR(1) process with a seasonal
//! mean and a nocturnal lift. Daily weather anomalies persist for several
//! days so that multi-day periods carry real structure.

use std::f64::consts::{PI, TAU};

use chrono::{NaiveDate, NaiveDateTime};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::series::AnnualSeries;

pub const FIXTURE_SEED: u64 = 20_240_601;
pub const FEATURES: [&str; 3] = ["load", "wind", "solar"];

/// Generates `days × 24` hours. Values are MW for load and capacity
/// factors in `[0, 1]` for wind and solar.
pub fn synthetic_year(seed: u64, days: usize) -> AnnualSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut heat = 0.0;
    let mut cloud = 0.0;
    let mut wind_state = 0.0;
    let mut values = Vec::with_capacity(days * 24 * 3);

    for day in 0..days {
        let phase = day as f64 / 365.0 * TAU;
        // Peaks around late July, trough in late January.
        let summer = (phase - 200.0 / 365.0 * TAU).cos();
        let winter = (phase - 15.0 / 365.0 * TAU).cos().max(0.0);
        let weekend = matches!(day % 7, 5 | 6);

        heat = 0.8 * heat + 0.6 * unit.sample(&mut rng);
        cloud = 0.7 * cloud + 0.7 * unit.sample(&mut rng);
        let clearness = 1.0 / (1.0 + (-(1.2 - 0.6 * winter + cloud)).exp());
        let daylight = 12.0 + 2.5 * summer;
        let sunrise = 12.5 - daylight / 2.0;

        for hour in 0..24 {
            let h = hour as f64;
            let evening = 18.0 - 1.5 * summer;
            let diurnal = 0.55 * (-(h - evening).powi(2) / 8.0).exp()
                + 0.35 * (-(h - 9.0).powi(2) / 6.0).exp()
                - 0.35 * (-(h - 3.5).powi(2) / 5.0).exp();
            let mut load = 30_000.0
                + 7_000.0 * summer.max(0.0)
                + 2_500.0 * winter
                + 6_000.0 * diurnal * (1.0 + 0.4 * summer.max(0.0))
                + 1_800.0 * heat * (0.5 + summer.max(0.0))
                + 300.0 * unit.sample(&mut rng);
            if weekend {
                load *= 0.88;
            }

            let into_day = h + 0.5 - sunrise;
            let solar = if (0.0..daylight).contains(&into_day) {
                let bell = (PI * into_day / daylight).sin().powf(1.3);
                (bell * clearness * (0.85 + 0.1 * summer) + 0.02 * unit.sample(&mut rng))
                    .clamp(0.0, 1.0)
            } else {
                0.0
            };

            wind_state = 0.9 * wind_state + 0.35 * unit.sample(&mut rng);
            let night = (TAU * (h - 3.0) / 24.0).cos();
            let spring = (phase - 110.0 / 365.0 * TAU).cos();
            let wind = 1.0 / (1.0 + (-(wind_state - 0.6 + 0.5 * spring + 0.3 * night)).exp());

            values.extend_from_slice(&[load, wind, solar]);
        }
    }
    AnnualSeries::new(values, FEATURES.iter().map(|s| s.to_string()).collect())
        .expect("synthetic values are finite")
}

/// Timestamp of the first synthetic hour, 2030-01-01 00:00.
pub fn start_time() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2030, 1, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid date")
}

/// The fixed 365-day fixture used by the acceptance suite.
pub fn fixture_year() -> AnnualSeries {
    synthetic_year(FIXTURE_SEED, 365)
}
