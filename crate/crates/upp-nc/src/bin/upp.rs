fn main() { std::process::exit(upp_nc::cli::main()) }
