# Test package for the LFR benchmark and community detection suite
