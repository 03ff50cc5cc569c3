#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "soaforge/soaforge.h"

TEST_CASE("version and error strings are always available") {
    CHECK(sf_version() != nullptr);
    CHECK(std::strlen(sf_version()) > 0);
    CHECK(sf_last_error() != nullptr);
}

TEST_CASE("layout and quantize entry points") {
    int s = 0, e = 0, m = 0;
    REQUIRE(sf_layout_for(32, &s, &e, &m) == SF_OK);
    CHECK(s == 1);
    CHECK(e == 8);
    CHECK(m == 23);
    CHECK(sf_layout_for(6, &s, &e, &m) == SF_INVALID_ARG);
    CHECK(std::strlen(sf_last_error()) > 0);
    CHECK(sf_layout_for(16, nullptr, &e, &m) == SF_INVALID_ARG);

    double q = 0;
    REQUIRE(sf_quantize(3.14159265358979312, 17, &q) == SF_OK);
    CHECK(q == 3.140625);
    CHECK(sf_quantize(1.0, 99, &q) == SF_INVALID_ARG);
}

TEST_CASE("schema handles") {
    sf_schema* handle = nullptr;
    REQUIRE(sf_schema_parse("schema s { field a : f64 x3; field b : f32 @truncate(20); }",
                            &handle) == SF_OK);
    uint64_t bits = 0;
    int fields = 0;
    CHECK(sf_schema_record_bits(handle, &bits) == SF_OK);
    CHECK(bits == 192 + 20);
    CHECK(sf_schema_field_count(handle, &fields) == SF_OK);
    CHECK(fields == 2);
    const char* text = nullptr;
    REQUIRE(sf_schema_print(handle, &text) == SF_OK);
    sf_schema* reparsed = nullptr;
    REQUIRE(sf_schema_parse(text, &reparsed) == SF_OK);
    uint64_t bits2 = 0;
    CHECK(sf_schema_record_bits(reparsed, &bits2) == SF_OK);
    CHECK(bits2 == bits);
    sf_schema_destroy(reparsed);
    sf_schema_destroy(handle);

    sf_schema* bad = nullptr;
    CHECK(sf_schema_parse("schema { oops", &bad) == SF_PARSE_ERROR);
    CHECK(bad == nullptr);
}

TEST_CASE("config keys validate") {
    sf_config* config = nullptr;
    REQUIRE(sf_config_create(&config) == SF_OK);
    CHECK(sf_config_set_int(config, "particles", 128) == SF_OK);
    CHECK(sf_config_set_int(config, "buffer-size", 64) == SF_OK);
    CHECK(sf_config_set_int(config, "particles", -1) == SF_INVALID_ARG);
    CHECK(sf_config_set_int(config, "warp-speed", 9) == SF_INVALID_ARG);
    CHECK(sf_config_set_string(config, "variants", "cpu-baseline,dev-soa") == SF_OK);
    CHECK(sf_config_set_string(config, "variants", "warp") == SF_INVALID_ARG);
    CHECK(sf_config_set_string(config, "writeback", "per-access") == SF_OK);
    CHECK(sf_config_set_string(config, "writeback", "sometimes") == SF_INVALID_ARG);
    CHECK(sf_config_set_double(config, "bandwidth", 0.0) == SF_INVALID_ARG);
    CHECK(sf_config_set_double(config, "latency", 1e-6) == SF_OK);
    sf_config_destroy(config);
}

TEST_CASE("validate command runs the battery through the C surface") {
    sf_config* config = nullptr;
    REQUIRE(sf_config_create(&config) == SF_OK);
    REQUIRE(sf_config_set_int(config, "particles", 128) == SF_OK);
    REQUIRE(sf_config_set_int(config, "threads", 2) == SF_OK);
    const char* report = nullptr;
    CHECK(sf_run_validate(config, &report) == SF_OK);
    REQUIRE(report != nullptr);
    CHECK(std::string(report).find("PASS") != std::string::npos);
    CHECK(std::string(report).find("FAIL") == std::string::npos);

    REQUIRE(sf_config_set_int(config, "fault", 1) == SF_OK);
    CHECK(sf_run_validate(config, &report) == SF_CHECK_FAILED);
    CHECK(std::string(report).find("FAIL cross-variant-checksums") != std::string::npos);
    sf_config_destroy(config);
}

TEST_CASE("truncation study through the C surface") {
    sf_config* config = nullptr;
    REQUIRE(sf_config_create(&config) == SF_OK);
    REQUIRE(sf_config_set_int(config, "particles", 256) == SF_OK);
    REQUIRE(sf_config_set_int(config, "threads", 2) == SF_OK);
    REQUIRE(sf_config_set_string(config, "precision", "64,32") == SF_OK);
    const char* csv = nullptr;
    REQUIRE(sf_run_study_truncation(config, &csv) == SF_OK);
    const std::string text(csv);
    CHECK(text.rfind("# soaforge v", 0) == 0);
    CHECK(text.find("\n64,0,0\n") != std::string::npos);  // exact zero at full width
    sf_config_destroy(config);
}
