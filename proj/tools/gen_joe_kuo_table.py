#!/usr/bin/env python3
"""Regenerate include/asian/joe_kuo_table.hpp from the new-joe-kuo-6.21201
direction numbers shipped with scipy.

usage: gen_joe_kuo_table.py [dimensions] > include/asian/joe_kuo_table.hpp
"""
import os
import sys

import numpy as np
import scipy

dims = int(sys.argv[1]) if len(sys.argv) > 1 else 1024
data = np.load(os.path.join(os.path.dirname(scipy.__file__), "stats",
                            "_sobol_direction_numbers.npz"))
poly, vinit = data["poly"], data["vinit"]

lines = []
for d in range(2, dims + 1):
    p = int(poly[d - 1])
    s = p.bit_length() - 1
    a = (p >> 1) & ((1 << (s - 1)) - 1)
    m = " ".join(str(int(v)) for v in vinit[d - 1][:s])
    lines.append(f"{d} {s} {a} {m}")

print("// Generated by tools/gen_joe_kuo_table.py. Do not edit.")
print("#pragma once")
print()
print("namespace asian::detail {")
print()
print(f"// Joe-Kuo new-joe-kuo-6.21201, dimensions 2..{dims}: d s a m_1 .. m_s")
print("inline constexpr const char* joe_kuo_table =")
for ln in lines:
    print(f'    "{ln}\\n"')
print("    ;")
print()
print("}  // namespace asian::detail")
