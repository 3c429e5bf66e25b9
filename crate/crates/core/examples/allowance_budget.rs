//! Allowance-style pass/fail: the ceiling is a sum of per-interface budgets,
//! so it says nothing about efficiency at any load.

use std::collections::BTreeMap;

use greenbench::metrics::{allowance_budget, AllowanceTable, AvgPower};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = AllowanceTable::new(BTreeMap::from([("WAN".to_string(), 10.0), ("LAN".to_string(), 2.0)]))?;
    let counts = BTreeMap::from([("WAN".to_string(), 1), ("LAN".to_string(), 4)]);
    for measured in [12.0, 18.0, 18.1] {
        let v = allowance_budget(&counts, &table, AvgPower::watts(measured))?;
        println!(
            "measured {measured:>5.1} W  ceiling {:>5.1} W  {}",
            v.ceiling.value(),
            if v.pass { "pass" } else { "fail" }
        );
    }
    Ok(())
}
