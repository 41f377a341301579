use clap::Parser;
use shp_cli::Cli;

fn main() {
    let cli = Cli::parse();
    let code = shp_cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
