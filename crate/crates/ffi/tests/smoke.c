#include <stdio.h>
#include <string.h>
#include "fibconv.h"

#define CHECK(cond)                                            \
  do {                                                         \
    if (!(cond)) {                                             \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                \
    }                                                          \
  } while (0)

int main(void) {
  char *s = NULL;
  CHECK(fc_fib(90, &s) == FC_STATUS_OK);
  CHECK(strcmp(s, "2880067194370816120") == 0);
  fc_string_free(s);

  FcSpec *spec = NULL;
  CHECK(fc_spec_builtin("fib", &spec) == FC_STATUS_OK);
  FcWeights *w = NULL;
  CHECK(fc_collect(spec, 6, &w) == FC_STATUS_OK);
  CHECK(fc_weights_len(w) == 5);
  CHECK(fc_weights_get(w, 5, &s) == FC_STATUS_OK);
  CHECK(strcmp(s, "11") == 0);
  fc_string_free(s);
  fc_weights_free(w);
  fc_spec_free(spec);

  FcReport *r = NULL;
  CHECK(fc_check_range(2, 300, 0, &r) == FC_STATUS_OK);
  CHECK(fc_report_passed(r));
  fc_report_free(r);

  CHECK(fc_spec_parse("seq F: F(n) = F(n-1) $", &spec) == FC_STATUS_PARSE);
  CHECK(strncmp(fc_last_error_message(), "1:22", 4) == 0);

  puts("ok");
  return 0;
}
