#include "doctest.h"

#include "purcell/device_config.hpp"

using namespace purcell;

namespace {

const char* kMinimalConfig = R"({
  "qubits": [
    {"id": "q6", "freq_idle": "4.83 GHz", "anharmonicity": "188 MHz",
     "T1": "35.6 us", "T2": "19.03 us", "EC": "188 MHz"}
  ],
  "resonators": [
    {"id": "r6", "freq_bare": "6.45 GHz", "C_r": "100 fF", "C_qr": "3.797 fF",
     "C_rf": "1.411 fF", "g_qr": "104.4 MHz", "g_rf": "20 MHz"}
  ],
  "filters": [
    {"id": "f1", "omega0_bare": "9.3 GHz", "Ic1": "0.085 uA", "Ic2": "0.315 uA",
     "Lu": "464 nH/m", "Cu": "203 pF/m", "C_in": "15.7 fF", "C_out": "106.5 fF",
     "anharmonicity_f": "4.47 MHz", "kappa_f": "150 MHz"}
  ],
  "topology": [["q6", "r6", "104.4 MHz"], ["r6", "f1", "20 MHz"]]
})";

} // namespace

TEST_CASE("quantity parsing handles units and raw numbers") {
  CHECK(parse_quantity("4.83 GHz") == doctest::Approx(4.83e9));
  CHECK(parse_quantity("35.6 us") == doctest::Approx(35.6e-6));
  CHECK(parse_quantity("0.085 uA") == doctest::Approx(0.085e-6));
  CHECK(parse_quantity("15.7 fF") == doctest::Approx(15.7e-15));
  CHECK(parse_quantity("464 nH/m") == doctest::Approx(464e-9));
  CHECK(parse_quantity("6450000000") == doctest::Approx(6.45e9));
  CHECK_THROWS_AS(parse_quantity("12 parsec"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("fast"), ConfigError);
}

TEST_CASE("minimal config loads with one element of each kind") {
  const auto cfg = parse_device_config(kMinimalConfig);
  CHECK(cfg.qubits.size() == 1);
  CHECK(cfg.resonators.size() == 1);
  CHECK(cfg.filters.size() == 1);
  CHECK(cfg.topology.size() == 2);
}

TEST_CASE("table values are stored in base units with signed anharmonicity") {
  const auto cfg = parse_device_config(kMinimalConfig);
  const auto& q = cfg.qubit("q6");
  CHECK(q.freq_idle == doctest::Approx(4.83e9));
  // magnitudes in the file, transmon sign applied on ingestion
  CHECK(q.anharmonicity == doctest::Approx(-188e6));
  CHECK(q.t1 == doctest::Approx(35.6e-6));
  const auto& f = cfg.filter("f1");
  CHECK(f.ic1 == doctest::Approx(0.085e-6));
  CHECK(f.lu == doctest::Approx(464e-9));
  CHECK(f.kappa_f == doctest::Approx(150e6));
}

TEST_CASE("invariant violations name the element and field") {
  std::string bad = kMinimalConfig;
  const auto pos = bad.find("\"100 fF\"");
  bad.replace(pos, 8, "-1e-13");
  try {
    parse_device_config(bad);
    FAIL("expected a validation error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("r6") != std::string::npos);
    CHECK(msg.find("C_r") != std::string::npos);
  }
}

TEST_CASE("missing required field is reported") {
  const char* missing = R"({"qubits": [{"id": "q1", "freq_idle": 5e9}]})";
  CHECK_THROWS_WITH_AS(parse_device_config(missing),
                       doctest::Contains("anharmonicity"), ConfigError);
}

TEST_CASE("topology edges must reference existing elements") {
  std::string bad = kMinimalConfig;
  const auto pos = bad.find("\"r6\", \"f1\"");
  bad.replace(pos, 10, "\"r6\", \"f9\"");
  CHECK_THROWS_WITH_AS(parse_device_config(bad), doctest::Contains("f9"), ConfigError);
}

TEST_CASE("parse failure carries the json error") {
  CHECK_THROWS_AS(parse_device_config("{ not json"), ConfigError);
}

TEST_CASE("serialize-load round trip is the identity after normalization") {
  const auto cfg = parse_device_config(kMinimalConfig);
  const auto text = serialize_device_config(cfg);
  const auto cfg2 = parse_device_config(text);
  const auto text2 = serialize_device_config(cfg2);
  CHECK(text == text2);
  CHECK(cfg2.qubit("q6").anharmonicity == cfg.qubit("q6").anharmonicity);
  CHECK(cfg2.filter("f1").cu == cfg.filter("f1").cu);
}

TEST_CASE("missing file is a config error") {
  CHECK_THROWS_AS(load_device_config("/nonexistent/device.json"), ConfigError);
}
