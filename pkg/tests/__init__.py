# Tests package for the doubling Calabi-Yau invariants engine
