#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "yamabe.h"

#define CHECK(call)                                                              \
    do {                                                                         \
        YamabeStatus s_ = (call);                                                \
        if (s_ != YAMABE_STATUS_OK) {                                            \
            fprintf(stderr, "%s: status %d: %s\n", #call, (int)s_,               \
                    yamabe_last_error() ? yamabe_last_error() : "(none)");       \
            return 1;                                                            \
        }                                                                        \
    } while (0)

int main(void) {
    YamabeParams *p = NULL;
    CHECK(yamabe_params_soliton(3, 3.0, 1.0, 1.0, &p));

    YamabeClass cls;
    CHECK(yamabe_classify(p, &cls));
    if (cls.kind != YAMABE_SOLITON_KIND_SHRINKING || !cls.covered) return 2;

    YamabeSettings st = yamabe_settings_default();
    YamabeProfile *prof = NULL;
    CHECK(yamabe_solve(p, 100.0, &st, &prof));
    size_t n = 0;
    CHECK(yamabe_profile_len(prof, &n));
    double *w = malloc(n * sizeof *w);
    YamabeGeometry *geo = NULL;
    CHECK(yamabe_geometry(prof, &geo));
    CHECK(yamabe_geometry_column(geo, YAMABE_GEOMETRY_COLUMN_W, w, n));
    YamabeOriginValues o;
    CHECK(yamabe_geometry_origin(geo, &o));
    printf("points=%zu w_last=%.6f R0=%.6f K0=%.6f K1=%.6f\n", n, w[n - 1], o.scalar_curvature, o.k0, o.k1);
    if (fabs(o.scalar_curvature - 7.0) > 1e-4) return 3;

    if (yamabe_profile_eval(prof, 1e6, &w[0], &w[1]) != YAMABE_STATUS_OUT_OF_RANGE) return 4;
    printf("expected failure: %s\n", yamabe_last_error());

    YamabeReport *rep = NULL;
    CHECK(yamabe_verify(p, 1e4, NULL, false, &rep));
    YamabeVerdict v;
    CHECK(yamabe_report_overall(rep, &v));
    char *json = NULL;
    CHECK(yamabe_report_json(rep, &json));
    printf("verdict=%d json_bytes=%zu version=%s\n", (int)v, strlen(json), yamabe_version());

    yamabe_string_free(json);
    yamabe_report_free(rep);
    yamabe_geometry_free(geo);
    yamabe_profile_free(prof);
    yamabe_params_free(p);
    free(w);
    return v == YAMABE_VERDICT_PASS ? 0 : 5;
}
