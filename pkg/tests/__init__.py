# Tests for the tubalfgd package
