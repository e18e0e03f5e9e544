//! Drives the command-line front end in-process: writes a fixture spec,
//! validates it and reduces a word on it.

fn main() {
    let dir = std::env::temp_dir().join("loopnet-example");
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("twotowers.json");
    let spec = spec.to_str().unwrap();
    let run = |args: &[&str]| {
        let code = loopnet::cli::run_from(std::iter::once("loopnet").chain(args.iter().copied()));
        println!("exit code {code}");
    };
    run(&["--output", spec, "fixture", "twotowers"]);
    run(&["validate", spec]);
    run(&["word", "--poset", spec, "reduce", "(o1b;x1,y1) (o1a;y1,x1) ~(o1a;y1,x1)"]);
}
