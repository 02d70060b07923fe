fn main() {
    std::process::exit(freqgate::app::main_with(std::env::args_os()));
}
