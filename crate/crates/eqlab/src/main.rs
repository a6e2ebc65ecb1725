fn main() {
    let outcome = eqlab::cli::execute(std::env::args_os());
    std::process::exit(outcome.exit_code);
}
