#include <math.h>
#include <stdio.h>
#include "sss.h"

static int check(int ok, const char *what) {
    if (!ok) {
        const char *msg = sss_last_error_message();
        fprintf(stderr, "FAIL %s (%s)\n", what, msg ? msg : "no message");
    }
    return ok ? 0 : 1;
}

int main(void) {
    int failures = 0;
    SssProfile *p = NULL;
    double f = 0.0, fp = 0.0, zeros[4];
    size_t n = 0;

    failures += check(sss_profile_new(1, 2.0, 1, &p) == SSS_STATUS_OK, "profile_new");
    failures += check(sss_profile_zero_count(p) >= 1, "zero_count");
    failures += check(sss_profile_zeros(p, zeros, 4, &n) == SSS_STATUS_OK, "zeros");
    failures += check(fabs(zeros[0] - sqrt(2.0)) < 1e-10, "first zero sqrt(2)");
    failures += check(sss_profile_eval(p, 0.5, &f, &fp) == SSS_STATUS_OK, "eval");
    failures += check(fabs(f - (1.0 - 0.125)) < 1e-10 && fabs(fp + 0.5) < 1e-10, "parabola value");
    failures += check(sss_profile_eval(p, -1.0, &f, &fp) == SSS_STATUS_OUT_OF_RANGE, "negative s rejected");
    failures += check(sss_last_error_message() != NULL, "error message set");
    sss_profile_free(p);

    double alpha = 0.0;
    failures += check(sss_exponent(1, -1, 1, &alpha) == SSS_STATUS_OK, "exponent");
    failures += check(alpha > 0.0 && alpha < 2.0, "alpha^-_1 in (0, 2)");
    failures += check(sss_exponent(1, 0, 1, &alpha) == SSS_STATUS_INVALID_ARGUMENT, "bad sign");

    printf("%s %d\n", sss_version(), failures);
    return failures;
}
