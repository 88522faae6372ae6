#include <stdio.h>
#include <string.h>
#include "diracsym.h"

#define CHECK(c) do { if (!(c)) { fprintf(stderr, "check failed line %d: %s\n", __LINE__, #c); return 1; } } while (0)

int main(void) {
    DsConfig *cfg = NULL;
    CHECK(ds_config_parse("mode = verify-theorem\nc1 = 1\n", &cfg) == DS_STATUS_OK);
    DsOutcome *out = NULL;
    CHECK(ds_run(cfg, &out) == DS_STATUS_OK);
    CHECK(ds_outcome_exit_code(out) == 0);
    char *json = ds_outcome_report_json(out);
    CHECK(strstr(json, "\"line\": \"1/1\"") != NULL);
    ds_string_free(json);
    ds_outcome_free(out);
    ds_config_free(cfg);

    DsConfig *bad = NULL;
    CHECK(ds_config_parse("mode = sweep\ndepth = 5\n", &bad) == DS_STATUS_CONFIG_ERROR);
    CHECK(bad == NULL);
    CHECK(strstr(ds_last_error(), "depth") != NULL);

    DsJet *a = NULL, *b = NULL, *p = NULL;
    CHECK(ds_jet_parse("1 + x1", 2, &a) == DS_STATUS_OK);
    CHECK(ds_jet_parse("1 - x1", 2, &b) == DS_STATUS_OK);
    CHECK(ds_jet_mul(a, b, &p) == DS_STATUS_OK);
    char *s = ds_jet_to_string(p);
    printf("%s\n", s);
    CHECK(strcmp(s, "(1) + (-1)*x1^2") == 0);
    ds_string_free(s);
    ds_jet_free(a);
    ds_jet_free(b);
    ds_jet_free(p);
    printf("version %s\n", ds_version());
    return 0;
}
