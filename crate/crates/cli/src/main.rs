fn main() {
    std::process::exit(oamfid::main_entry());
}
