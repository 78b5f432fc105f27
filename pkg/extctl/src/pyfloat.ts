/**
 * Shortest round-trip decimal rendering of a 64-bit float, in the exact
 * conventions the plant side uses (Python float repr): trailing ".0" on
 * integral values, positional notation while the decimal exponent is in
 * [-4, 16), otherwise scientific with a signed two-digit-minimum exponent.
 *
 * Byte-identical output for identical doubles is what makes command lines
 * and config digests comparable across the two runtimes.
 */
export function pyFloat(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error(`non-finite value ${x}`);
  }
  if (Number.isInteger(x) && Math.abs(x) < 1e16) {
    if (Object.is(x, -0)) {
      return "-0.0";
    }
    return x.toFixed(1);
  }
  const neg = x < 0;
  // toExponential() with no argument yields the shortest unique digits
  const m = /^(\d)(?:\.(\d+))?e([+-]\d+)$/.exec(Math.abs(x).toExponential());
  if (!m) {
    throw new Error(`unexpected exponential form for ${x}`);
  }
  const digits = m[1] + (m[2] ?? "");
  const e10 = parseInt(m[3], 10);
  let body: string;
  if (e10 >= -4 && e10 < 16) {
    if (e10 >= digits.length - 1) {
      body = digits + "0".repeat(e10 - (digits.length - 1)) + ".0";
    } else if (e10 >= 0) {
      body = digits.slice(0, e10 + 1) + "." + digits.slice(e10 + 1);
    } else {
      body = "0." + "0".repeat(-e10 - 1) + digits;
    }
  } else {
    const mantissa = digits.length > 1 ? digits[0] + "." + digits.slice(1) : digits;
    const sign = e10 < 0 ? "-" : "+";
    const magnitude = Math.abs(e10).toString().padStart(2, "0");
    body = `${mantissa}e${sign}${magnitude}`;
  }
  return neg ? "-" + body : body;
}
