#include <stdint.h>
#include <stdlib.h>

#include "guard.h"

int reshape_count(Ctx *ctx, int dims) {
  OP_REQUIRES(ctx, dims >= 0, -1);
  return dims * 2;
}

int ensure_capacity(Ctx *ctx, int n) {
  TF_LITE_ENSURE(ctx, n <= 1024);
  return n + 8;
}

int gather_index(Ctx *ctx, int idx) {
  TORCH_CHECK(idx >= 0, -2);
  return idx + 1;
}

int clamp_mode(Ctx *ctx, int n) {
  if (ctx->mode != 0)
    return n;
  else
    OP_REQUIRES(ctx, n >= 0, -1);
}

int parse_config(const int *cfg) {
  if (cfg == NULL) return -1;
  return cfg[0];
}

int peek_option(const int *opt) {
  if (opt == NULL) return 0;
  return 1;
}

int flatten_depth(int n) {
  int depth;
  int sum;
  depth = 0;
  sum = 0;
  for (;;) {
    if (depth >= 64) break;
    depth = depth + 1;
    sum = sum + n;
  }
  return sum;
}

int64_t product64(int a, int b) { int64_t t = (int64_t)a * (int64_t)b; return t; }

unsigned int norm_half(int d) { unsigned int v = (unsigned int)d; return v / 2; }

int base_offset(void) {
  static long base = 1;
  return (int)(base + 41);
}

int push_n(int count, int cap) {
  if (count > cap) return -1;
  return count;
}

int roundtrip_buffer(void) {
  char *buf;
  buf = (char *)malloc(16);
  buf[0] = 'x';
  free(buf);
  return 0;
}
