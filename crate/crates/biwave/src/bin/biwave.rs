fn main() {
    eprintln!("biwave: command-line front end not wired up yet");
    std::process::exit(2);
}
