#!/usr/bin/env python3
"""Regenerates src/stroke_font_data.cpp from the Hershey simplex fonts.

Requires the Hershey-Fonts package (pip install Hershey-Fonts), which ships
the public-domain Hershey glyph tables as .jhf records.
"""
import io
import math
import sys
import tarfile

from HersheyFonts import HersheyFonts

GREEK = {
    "alpha": "a", "beta": "b", "gamma": "g", "delta": "d", "epsilon": "e",
    "varepsilon": "e", "zeta": "z", "eta": "h", "theta": "q", "vartheta": "q",
    "iota": "i", "kappa": "k", "lambda": "l", "mu": "m", "nu": "n", "xi": "x",
    "pi": "p", "rho": "r", "sigma": "s", "tau": "t", "upsilon": "u",
    "phi": "f", "varphi": "f", "chi": "c", "psi": "y", "omega": "w",
    "Gamma": "G", "Delta": "D", "Theta": "Q", "Lambda": "L", "Xi": "X",
    "Pi": "P", "Sigma": "S", "Upsilon": "U", "Phi": "F", "Psi": "Y",
    "Omega": "W",
}
MATHLOW = {"pm": "!", "mp": '"', "times": "#", "cdot": "$", "leq": "&", "geq": "'"}
GREEK_SYMBOLS = {"sum": "S", "prod": "P", "circ": "V", "div": "v"}


def load(name):
    fonts = HersheyFonts()
    blob = fonts._HersheyFonts__get_compressed_font_bytes()
    with tarfile.open(fileobj=io.BytesIO(blob)) as tar:
        lines = tar.extractfile(name).read().decode().splitlines()
    return [ln[8:] for ln in lines[1:]]


def enc(v):
    return chr(82 + v)


def glyph(bounds, strokes):
    out = enc(bounds[0]) + enc(bounds[1])
    for i, s in enumerate(strokes):
        if i:
            out += " R"
        out += "".join(enc(x) + enc(y) for x, y in s)
    return out


def decode(data):
    strokes, cur = [], []
    body = data[2:]
    for i in range(0, len(body), 2):
        pair = body[i:i + 2]
        if pair == " R":
            strokes.append(cur)
            cur = []
        else:
            cur.append((ord(pair[0]) - 82, ord(pair[1]) - 82))
    if cur:
        strokes.append(cur)
    return (ord(data[0]) - 82, ord(data[1]) - 82), strokes


def shifted(data, dx, dy):
    b, s = decode(data)
    return [[(x + dx, y + dy) for x, y in st] for st in s]


def custom(roman):
    g = {}
    eq_b, eq_s = decode(roman["="])
    g["neq"] = glyph(eq_b, eq_s + [[(5, -7), (-5, 7)]])
    tilde = decode(roman["~"])[1][0]
    g["approx"] = glyph((-10, 10), [[(x, y - 3) for x, y in tilde], [(x, y + 3) for x, y in tilde]])
    dot_b, _ = decode(roman["."])
    dot = shifted(roman["."], 0, 0)
    cy = sum(y for x, y in dot[0]) / len(dot[0])
    g["ldots"] = glyph((-12, 12), [[(x + dx, y) for x, y in dot[0]] for dx in (-7, 0, 7)])
    g["cdots"] = glyph((-12, 12), [[(x + dx, y - round(cy)) for x, y in dot[0]] for dx in (-7, 0, 7)])
    inf = []
    for k in range(33):
        t = 2 * math.pi * k / 32
        d = 1 + math.sin(t) ** 2
        inf.append((round(9 * math.cos(t) / d), round(9 * math.sin(t) * math.cos(t) / d)))
    g["infty"] = glyph((-11, 11), [inf])
    g["int"] = glyph((-7, 7), [[(6, -13), (5, -14), (4, -14), (3, -13), (2, -11), (1, -5),
                                 (-1, 11), (-2, 15), (-3, 17), (-4, 17), (-5, 16)]])
    g["surd"] = glyph((-8, 6), [[(-7, 1), (-5, 0), (0, 9), (6, -12)]])
    g["tofu"] = glyph((-7, 7), [[(-5, -12), (5, -12), (5, 9), (-5, 9), (-5, -12)]])
    return g


def main(out_path):
    roman = {chr(32 + i): d for i, d in enumerate(load("futural")) if 32 + i < 127}
    # The period and comma sit above the baseline in this table; drop them onto it.
    for c in ".,":
        b, s = decode(roman[c])
        roman[c] = glyph(b, [[(x, y + 3) for x, y in st] for st in s])
    greek = {chr(32 + i): d for i, d in enumerate(load("greek"))}
    mathlow = {chr(32 + i): d for i, d in enumerate(load("mathlow"))}
    entries = [(c, roman[c]) for c in sorted(roman)]
    entries += [("\\" + k, greek[v]) for k, v in GREEK.items()]
    entries += [("\\" + k, mathlow[v]) for k, v in MATHLOW.items()]
    entries += [("\\" + k, greek[v]) for k, v in GREEK_SYMBOLS.items()]
    entries += [("\\" + k, v) for k, v in custom(roman).items()]
    with open(out_path, "w") as f:
        f.write("// Generated by tools/gen_stroke_font.py. Do not edit.\n")
        f.write("//\n// Glyph outlines derived from the Hershey simplex roman, simplex greek and\n")
        f.write("// math-symbol tables (public domain, A. V. Hershey, U.S. National Bureau of\n")
        f.write("// Standards). Each record is in Hershey vertex encoding: a left/right bound\n")
        f.write("// pair followed by coordinate pairs offset from 'R'; \" R\" lifts the pen.\n\n")
        f.write('#include "mathseed/stroke_font.hpp"\n\nnamespace mathseed::detail {\n\n')
        f.write("const std::vector<HersheyRecord>& hershey_records() {\n")
        f.write("  static const std::vector<HersheyRecord> records = {\n")
        for name, data in entries:
            key = name.replace("\\", "\\\\").replace('"', '\\"')
            f.write(f'      {{"{key}", R"hf({data})hf"}},\n')
        f.write("  };\n  return records;\n}\n\n}  // namespace mathseed::detail\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/stroke_font_data.cpp")
