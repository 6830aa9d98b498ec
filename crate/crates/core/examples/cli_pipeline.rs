// Drive the command-line interface in-process: synthesize a dataset, then
// validate and analyze it.

use portflow::cli::run;

const TARGET: &str = r#"
seed = 7
[[cells]]
year = 2019
direction = "IMPORT"
total_ffe = 236733.5
record_count = 12
routes = { W3 = 0.3816485626242167, W1 = 0.357693355608733, W5 = 0.10242741310376435, W2 = 0.09536461886467272, W4 = 0.045521651984193195, X6 = 0.017321164938633525, UNKNOWN = 2.3232875786485647e-5 }
origins = { NINGBO = 1.0 }
destinations = { NOUAKCHOTT = 1.0 }
industries = { "FOOD & BEVERAGE" = 1.0 }
"#;

fn call(args: &[&str]) -> Result<String, Box<dyn std::error::Error>> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("portflow").chain(args.iter().copied()), &mut out, &mut err);
    if code != 0 {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&err)).into());
    }
    Ok(String::from_utf8(out)?)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let target = dir.path().join("target.toml");
    let data = dir.path().join("routes.csv");
    std::fs::write(&target, TARGET)?;

    let target = target.to_str().unwrap();
    let data = data.to_str().unwrap();
    call(&["synth", "--target", target, "--mode", "exact", "--output", data])?;
    print!("{}", call(&["validate", "--config", "/dev/null", data])?);
    print!(
        "{}",
        call(&["analyze", "--config", "/dev/null", "--dimension", "route", "--scope", "all", "--top", "3", data])?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
