# Tests package for DetMax Lab
