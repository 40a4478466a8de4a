use clap::Parser;

fn main() {
    let cli = bqdim::cli::Cli::parse();
    let (out, err) = bqdim::cli::run(&cli);
    print!("{}", out.stdout);
    if let Some(e) = err {
        eprintln!("error: {e}");
    }
    std::process::exit(out.code as i32);
}
