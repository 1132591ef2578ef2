use clap::Parser;

fn main() {
    let args = acsv::cli::Args::parse();
    match acsv::cli::run(&args) {
        Ok(out) => print!("{}", out.rendered),
        Err((e, out)) => {
            if let Some(out) = out {
                print!("{}", out.rendered);
            }
            eprintln!("{}", e.diagnostic());
            std::process::exit(e.exit_code());
        }
    }
}
