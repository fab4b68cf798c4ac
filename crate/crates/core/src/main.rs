fn main() {
    std::process::exit(deceptive_synth::cli::run(std::env::args_os()));
}
