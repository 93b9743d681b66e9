"""Reference values for the C++ tests.

Computed without the inclusion-exclusion sum used by the library: expected
order statistics come from first-step analysis of the Markov chain over the
set of devices already held, in exact rational arithmetic; checksums from
textbook bit-serial CRC definitions. Run to regenerate the frozen constants.
"""

from fractions import Fraction
from functools import lru_cache
import math


def order_stats_dp(p0, p):
    """Expected draws until n distinct devices are held, n = 1..N (exact)."""
    N = len(p)
    full = (1 << N) - 1
    out = []
    for n in range(1, N + 1):
        @lru_cache(maxsize=None)
        def T(S):
            if bin(S).count("1") >= n:
                return Fraction(0)
            q = sum(p[i] for i in range(N) if not S >> i & 1)
            acc = Fraction(1)
            for i in range(N):
                if not S >> i & 1:
                    acc += p[i] * T(S | 1 << i)
            return acc / q
        out.append(T(0))
    return out


def order_stats_dp_float(p):
    """Same recursion in floats, for vectors given as floats."""
    N = len(p)
    res = []
    for n in range(1, N + 1):
        memo = {}
        def T(S):
            if S in memo:
                return memo[S]
            if bin(S).count("1") >= n:
                return 0.0
            q = math.fsum(p[i] for i in range(N) if not S >> i & 1)
            acc = 1.0 + math.fsum(p[i] * T(S | 1 << i) for i in range(N) if not S >> i & 1)
            memo[S] = acc / q
            return memo[S]
        res.append(T(0))
    return res


def crc_reflected(data, width, poly_reflected, init):
    reg = init
    for b in data:
        reg ^= b
        for _ in range(8):
            reg = (reg >> 1) ^ poly_reflected if reg & 1 else reg >> 1
    return reg & ((1 << width) - 1)


def crc_msb(data, width, poly, init):
    reg = init
    top = 1 << (width - 1)
    mask = (1 << width) - 1
    for b in data:
        reg ^= b << (width - 8)
        for _ in range(8):
            reg = ((reg << 1) ^ poly) & mask if reg & top else (reg << 1) & mask
    return reg


def reverse_bits(v, width):
    return int(format(v, f"0{width}b")[::-1], 2)


def main():
    print("N=3 p0=1/2 p=(1/5,1/5,1/10):")
    vals = order_stats_dp(Fraction(1, 2), [Fraction(1, 5), Fraction(1, 5), Fraction(1, 10)])
    for n, v in enumerate(vals, 1):
        print(f"  n={n} {v} = {float(v):.15g}")

    print("uniform N=2 p0=0:", order_stats_dp(Fraction(0), [Fraction(1, 2)] * 2))

    dt = 0.1
    zig = [8.5, 14.9, 14.9, 14.8, 14.0, 15.9, 7.5, 8.4, 8.3, 8.4, 8.4, 10.2]
    ble = [4.1, 4.6, 4.1, 3.9, 4.1, 11.0, 19.5, 25.7, 47.3, 23.1, 20.7, 119.5]
    for name, mus, C in (("zigbee C=16", zig, 16), ("ble C=1", ble, 1)):
        p = [(dt / m) * math.exp(-dt / m) / C for m in mus]
        print(name, "seconds:", [round(v * dt, 9) for v in order_stats_dp_float(p)])
    zw = [3600.0] * 7
    for name, C in (("zwave-lora C=1", 1), ("zwave-lora C=3", 3)):
        p = [(dt / m) * math.exp(-dt / m) / C for m in zw]
        print(name, "seconds:", [round(v * dt, 6) for v in order_stats_dp_float(p)])

    check = b"123456789"
    print("CRC-16/KERMIT   %04X" % crc_reflected(check, 16, reverse_bits(0x1021, 16), 0x0000))
    print("CRC-24/BLE      %06X" % crc_reflected(check, 24, reverse_bits(0x00065B, 24), reverse_bits(0x555555, 24)))
    print("CRC-16/AUG-CCITT %04X" % crc_msb(check, 16, 0x1021, 0x1D0F))
    x = 0xFF
    for b in check:
        x ^= b
    print("XOR8 init FF    %02X" % x)

    # BLE ADV_NONCONN_IND, AdvA 66:55:44:33:22:11, no data
    pdu = bytes([0x02, 0x06]) + bytes.fromhex("112233445566")
    crc = crc_reflected(pdu, 24, reverse_bits(0x00065B, 24), reverse_bits(0x555555, 24))
    frame = bytes.fromhex("D6BE898E") + pdu + crc.to_bytes(3, "little")
    print("BLE nonconn frame", frame.hex().upper())

    # Zigbee beacon request: FCF 0x0803 (MAC command, dest short), seq 0x2A, FFFF FFFF, cmd 07
    body = bytes([0x03, 0x08, 0x2A, 0xFF, 0xFF, 0xFF, 0xFF, 0x07])
    fcs = crc_reflected(body, 16, reverse_bits(0x1021, 16), 0)
    print("Zigbee beacon request", (body + fcs.to_bytes(2, "little")).hex().upper())

    # Z-Wave R3: home C0FFEE01, src 05, fc 0x4101 LE, len, dst 01, payload 20 02
    payload = bytes([0x20, 0x02])
    hdr = bytes.fromhex("C0FFEE01") + bytes([0x05, 0x01, 0x41])
    length = len(hdr) + 1 + 1 + len(payload) + 2
    body = hdr + bytes([length, 0x01]) + payload
    print("Z-Wave R3 frame", (body + crc_msb(body, 16, 0x1021, 0x1D0F).to_bytes(2, "big")).hex().upper())
    length = len(hdr) + 1 + 1 + len(payload) + 1
    body = hdr + bytes([length, 0x01]) + payload
    x = 0xFF
    for b in body:
        x ^= b
    print("Z-Wave R2 frame", (body + bytes([x])).hex().upper())


if __name__ == "__main__":
    main()
