fn main() { std::process::exit(critbase::cli::main()) }
