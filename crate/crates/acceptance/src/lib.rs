//! Holds the acceptance test target, which runs the shipped corpus.
