//! Host package for the `acceptance` test target, which checks the whole
//! library end to end and prints one PASS/FAIL line per criterion.
