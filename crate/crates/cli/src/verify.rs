use std::path::PathBuf;

use clap::Args;
use qsep::harness::{first_failure, verify_instance};
use qsep::oracle::io::{read_instance, read_meta};

use crate::exit::{Failure, Outcome};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Ground-truth sidecar (default: the instance's `.meta.json` sibling).
    #[arg(long)]
    meta: Option<PathBuf>,
}

pub fn run(ctx: &Ctx, args: VerifyArgs) -> Outcome {
    let meta_path = args.meta.clone().unwrap_or_else(|| {
        let name = args.instance.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let stem = name.strip_suffix(".instance.json").unwrap_or(&name);
        args.instance.with_file_name(format!("{stem}.meta.json"))
    });
    let (_, inst) = read_instance(&ctx.path(&args.instance))?;
    let meta = read_meta(&ctx.path(&meta_path))?;
    let checks = verify_instance(&inst, &meta);
    for c in &checks {
        println!("{}: {} [{}]", c.name, c.detail, if c.ok { "pass" } else { "FAIL" });
    }
    match first_failure(&checks) {
        None => {
            println!("verify=pass");
            Ok(())
        }
        Some(c) => {
            println!("verify=fail");
            Err(Failure::Verify(format!("{} violated: {}", c.name, c.detail)))
        }
    }
}
