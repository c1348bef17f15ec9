#include <stdio.h>
#include "foclite.h"

int main(void) {
    FocSession *s = NULL;
    FocStatus st = foc_session_new(NULL, FOC_WITH_CORPUS | FOC_PROVE, &s);
    if (st != FOC_STATUS_OK) {
        fprintf(stderr, "load failed: %d\n", st);
        return 1;
    }
    char *value = NULL;
    st = foc_eval(s, "IntFiniteParts", "release(from_list([1;2;1]), 1)", 1000000, &value);
    printf("%d %s\n", st, value);
    foc_string_free(value);
    foc_session_free(s);
    return st == FOC_STATUS_OK ? 0 : 1;
}
