"""flatlab: spheres with threads, tunnels and filling budgets"""
