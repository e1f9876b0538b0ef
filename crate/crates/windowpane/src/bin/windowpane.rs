fn main() {
    // CLI wiring lands once the solver pipeline is in place.
}
