//! Bundled device fixtures.
//!
//! The JSON files live in the crate's `fixtures/` directory and are also
//! compiled in, so examples and tests work from any directory.

use std::path::PathBuf;

use crate::sim::DeviceModel;

/// Environment variable that replaces the fixture directory.
pub const FIXTURES_ENV: &str = "GREENBENCH_FIXTURES";

pub const TABLE2_ROUTER: &str = include_str!("../fixtures/table2_router.json");
pub const PROPORTIONAL_IDEAL: &str = include_str!("../fixtures/proportional_ideal.json");
pub const CHEATER_DOWNSHIFT: &str = include_str!("../fixtures/cheater_downshift.json");
pub const THREE_STATE_ROUTER: &str = include_str!("../fixtures/three_state_router.json");
pub const TABLE1: [&str; 4] = [
    include_str!("../fixtures/table1/t640.json"),
    include_str!("../fixtures/table1/t1600.json"),
    include_str!("../fixtures/table1/t4000.json"),
    include_str!("../fixtures/table1/ptx.json"),
];

/// `$GREENBENCH_FIXTURES` when set, otherwise the crate's `fixtures/` directory.
pub fn fixture_dir() -> PathBuf {
    match std::env::var_os(FIXTURES_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures")),
    }
}

fn parse(text: &str) -> DeviceModel {
    DeviceModel::from_json(text).expect("bundled fixture is valid")
}

/// Six-point load/power response: 768, 790, 801, 816, 842, 863 W at
/// 0, 10, 30, 50, 80, 100% load; 100 Gbps NDR at 1518 bytes.
pub fn table2_router() -> DeviceModel {
    parse(TABLE2_ROUTER)
}

/// Power exactly proportional to load (8 W per Gbps) with zero idle power.
pub fn proportional_ideal() -> DeviceModel {
    parse(PROPORTIONAL_IDEAL)
}

/// Table 2 router that drops into a 30%-capacity state from 120 s to 180 s of
/// device time, which is the idle phase of a 60 s-per-phase variable-load
/// run started at t = 0.
pub fn cheater_downshift() -> DeviceModel {
    parse(CHEATER_DOWNSHIFT)
}

/// Table 2 router with two extra power states at 50% and 10% capacity.
pub fn three_state_router() -> DeviceModel {
    parse(THREE_STATE_ROUTER)
}

/// Four core routers whose peak power over NDR gives 14, 9.7, 3.54 and
/// 1.54 W/Gbps.
pub fn table1_devices() -> Vec<DeviceModel> {
    TABLE1.iter().map(|t| parse(t)).collect()
}
