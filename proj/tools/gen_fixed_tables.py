#!/usr/bin/env python3
"""Regenerates include/privade/numerics/fixed_tables.hpp.

The tables are committed so that every build (and every party) uses the
same constants; this script only documents how they were produced.
"""
from mpmath import mp, mpf, log, power, e, nint
import pathlib

mp.prec = 200
Q30 = mpf(2) ** 30


def q30(x):
    return int(nint(x * Q30))


ln_rows = [q30(log(1 + mpf(j) / 256)) for j in range(257)]
exp_rows = [q30(power(2, mpf(j) / 256)) for j in range(257)]


def emit(name, ctype, rows):
    body = ",\n".join(
        "    " + ", ".join(str(v) for v in rows[i:i + 6]) for i in range(0, len(rows), 6)
    )
    return f"inline constexpr std::array<{ctype}, {len(rows)}> {name} = {{\n{body}}};\n"


out = [
    "#pragma once\n",
    "// Generated by tools/gen_fixed_tables.py. Do not edit by hand.\n",
    "#include <array>\n#include <cstdint>\n",
    "namespace privade::numerics::tables {\n",
    f"inline constexpr std::int64_t kLn2Q30 = {q30(log(2))};\n",
    f"inline constexpr std::int64_t kLog2eQ30 = {q30(1 / log(2))};\n",
    "// ln(1 + j/256) in Q2.30, j = 0..256.\n",
    emit("kLnMantissaQ30", "std::int64_t", ln_rows),
    "// 2^(j/256) in Q2.30, j = 0..256.\n",
    emit("kExp2FracQ30", "std::int64_t", exp_rows),
    "}  // namespace privade::numerics::tables\n",
]
target = pathlib.Path(__file__).resolve().parent.parent / "include/privade/numerics/fixed_tables.hpp"
target.write_text("\n".join(out))
