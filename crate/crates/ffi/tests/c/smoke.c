#include <math.h>
#include <stdio.h>

#include "critcoupling.h"

int main(void) {
    CcShape *shape = NULL;
    if (cc_shape_builtin("square_well", NULL, NULL, 0, &shape) != CC_STATUS_OK) {
        fprintf(stderr, "builtin: %s\n", cc_last_error());
        return 1;
    }
    CcBound bound;
    if (cc_trace_lower_limit(shape, 0, 3, NULL, &bound) != CC_STATUS_OK) {
        fprintf(stderr, "trace: %s\n", cc_last_error());
        return 1;
    }
    printf("%.10f\n", bound.value);
    if (fabs(bound.value - cbrt(15.0)) > 1e-6) {
        return 2;
    }
    if (cc_hoelder_limit(shape, 0, NULL, &bound) != CC_STATUS_NOT_APPLICABLE) {
        return 3;
    }
    cc_shape_free(shape);
    return 0;
}
