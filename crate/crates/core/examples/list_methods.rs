// Browse the method registry and export one tableau as JSON.

use tdssp::registry::{self, Params};

pub fn run_example() -> tdssp::Result<usize> {
    let all = registry::all();
    println!("{:<22} {:<11} {:>2} {:>2} {:>2}  ssp", "name", "class", "s", "k", "p");
    for m in &all {
        let class = serde_json::to_value(m.class()).unwrap_or_default();
        let ssp = m.ssp_coefficient.map_or("-".to_string(), |c| format!("{c:.6}"));
        println!("{:<22} {:<11} {:>2} {:>2} {:>2}  {ssp}", m.name, class.as_str().unwrap_or("?"), m.stages(), m.steps(), m.order);
    }

    // Parametric entries take K, kappa or the number of steps.
    let k5 = registry::lookup_with("imex-glm-kstep-p2", &Params { steps: 5, ..Params::default() })?;
    println!("\nimex-glm-kstep-p2 with k = 5: ssp coefficient {:?}", k5.ssp_coefficient);

    let ts = registry::lookup("td-ts")?;
    println!("{}", serde_json::to_string_pretty(&ts.export()).expect("serializable"));
    Ok(all.len())
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
