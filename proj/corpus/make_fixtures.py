#!/usr/bin/env python3
"""Regenerates the binary fixtures under corpus/fixtures/.

All fixtures are synthetic and constructed to match the grammars in
corpus/grammars/, so the golden parse trees are fully determined.
"""
import struct
from pathlib import Path

OUT = Path(__file__).parent / "fixtures"
OUT.mkdir(exist_ok=True)


def w(name: str, data: bytes) -> None:
    (OUT / name).write_bytes(data)
    print(f"{name}: {len(data)} bytes")


# --- anchor: aa ... bb ---
w("anchor_aabb.bin", b"aabb")
w("anchor_aaXYbb.bin", b"aaXYbb")
w("anchor_aab.bin", b"aab")
w("anchor_abbb.bin", b"abbb")
w("anchor_aa.bin", b"aa")

# --- offlen: header(offset,length) + payload ---
w("offlen.bin", struct.pack("<II", 8, 4) + b"DATA")

# --- numeral: binary numeral ---
w("numeral_101.bin", b"101")

# --- endchain: "1" 0* "stop" ---
w("endchain_1000stop.bin", b"1000stop")
w("endchain_1stop.bin", b"1stop")
w("endchain_bad.bin", b"1000stoq")

# --- counted: count header + 4-byte entries; first value in (0, 10) ---
w("counted.bin", struct.pack("<III", 2, 5, 7))
w("counted_bad_pred.bin", struct.pack("<III", 2, 12, 7))  # a0 = 12 fails the predicate

# --- anbncn ---
w("anbncn_aabbcc.bin", b"aabbcc")
w("anbncn_aabbc.bin", b"aabbc")

# --- elf_subset ---
# Layout: header [0,64), DynSec section [64,96), raw section [96,112),
# section header table [112,240) with 2 entries of 64 bytes.
header = bytearray(64)
header[0:4] = b"\x7fELF"
struct.pack_into("<Q", header, 40, 112)  # table offset
struct.pack_into("<H", header, 58, 64)   # entry size
struct.pack_into("<H", header, 60, 2)    # entry count
dynsec = struct.pack("<QQ", 1, 100) + struct.pack("<QQ", 2, 200)
rawsec = b"HELLOWORLD123456"
def sh(typ: int, ofs: int, size: int) -> bytes:
    e = bytearray(64)
    struct.pack_into("<I", e, 4, typ)
    struct.pack_into("<Q", e, 24, ofs)
    struct.pack_into("<Q", e, 32, size)
    return bytes(e)
w("elf.bin", bytes(header) + dynsec + rawsec + sh(6, 64, 32) + sh(1, 96, 16))

# --- gif_subset: magic, 2-byte LSD (flag 0 -> no color table), blocks, trailer ---
def block(payload: bytes) -> bytes:
    return b"\x21" + bytes([len(payload)]) + payload

def gif(blocks: list[bytes]) -> bytes:
    return b"GIF89a" + b"\x00\x00" + b"".join(block(p) for p in blocks) + b"\x3b"

w("gif_1block.bin", gif([b"abc"]))
w("gif_2block.bin", gif([b"abc", b"defgh"]))
w("gif_7block.bin", gif([bytes([65 + i]) * (i + 1) for i in range(7)]))

# --- pdf_bnum: trailing digits ---
w("pdf_bnum_317.bin", b"xx317")

# --- pdf_twopass ---
# H(ofs=8, num=2) [0,8); SH table [8,24); obj0 at 24 (len 12), obj1 at 36 (len 10).
# Each object's own header stores its link (object index) and length.
pdf = struct.pack("<II", 8, 2)
pdf += struct.pack("<II", 24, 0) + struct.pack("<II", 36, 0)  # SH entries (4B ofs + pad)
pdf += struct.pack("<II", 0, 12) + b"obj0"                    # OH(link=0, len=12) + body
pdf += struct.pack("<II", 1, 10) + b"o1"                      # OH(link=1, len=10) + body
assert len(pdf) == 46
w("pdf_twopass.bin", pdf)

# --- nontermination regressions ---
w("digit_0.bin", b"0")
w("s.bin", b"s")
