#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <slc/config.hpp>
#include <slc/evaluation.hpp>
#include <slc/field_file.hpp>
#include <slc/io.hpp>
#include <slc/model.hpp>

namespace {

std::string temp_path(const char* name) {
    return std::string("./io_test_") + name;
}

slc::FieldFileData sample_field_data() {
    const auto m = slc::single_charge_qubit(slc::SingleQubitTarget::excited);
    slc::FieldFileData d;
    d.model_id = m.id;
    d.field = slc::reference_initial_field(m);
    d.seed_train = 42;
    d.objective = 0.98765432109876543;
    d.converged = true;
    d.iterations = 1234;
    return d;
}

}  // namespace

TEST_CASE("format_double round-trips every value bit for bit", "[config_io]") {
    const double values[] = {0.0,   1.0,        0.1,     1.0 / 3.0, M_PI,  1e-300,
                             1e300, 2.25e-308,  -42.5,   0.99999999999999989,
                             5.0,   -1.0 / 7.0, 6.02e23, 4.9406564584124654e-324};
    for (double v : values) {
        const std::string s = slc::format_double(v);
        CHECK(slc::parse_double_text(s, "t") == v);
    }
    // Negative zero keeps its sign through the text form.
    const double nz = slc::parse_double_text(slc::format_double(-0.0), "t");
    CHECK(std::signbit(nz));
}

TEST_CASE("numeric parsers demand full, finite tokens", "[config_io]") {
    CHECK(slc::parse_double_text("2.5", "t") == 2.5);
    CHECK(slc::parse_double_text("-1e3", "t") == -1000.0);
    CHECK_THROWS_AS(slc::parse_double_text("", "t"), slc::IoError);
    CHECK_THROWS_AS(slc::parse_double_text("abc", "t"), slc::IoError);
    CHECK_THROWS_AS(slc::parse_double_text("1.5x", "t"), slc::IoError);
    CHECK_THROWS_AS(slc::parse_double_text("1.5 ", "t"), slc::IoError);
    CHECK_THROWS_AS(slc::parse_double_text("nan", "t"), slc::IoError);
    CHECK_THROWS_AS(slc::parse_double_text("inf", "t"), slc::IoError);

    CHECK(slc::parse_int_text("42", "t") == 42);
    CHECK(slc::parse_int_text("-3", "t") == -3);
    CHECK_THROWS_AS(slc::parse_int_text("4.5", "t"), slc::IoError);
    CHECK_THROWS_AS(slc::parse_int_text("", "t"), slc::IoError);

    CHECK(slc::parse_uint64_text("18446744073709551615", "t") == 18446744073709551615ULL);
    CHECK(slc::parse_uint64_text("0", "t") == 0);
    CHECK_THROWS_AS(slc::parse_uint64_text("-1", "t"), slc::IoError);
    CHECK_THROWS_AS(slc::parse_uint64_text("12a", "t"), slc::IoError);
}

TEST_CASE("fnv1a64 matches the published test vectors", "[config_io]") {
    CHECK(slc::fnv1a64(std::string{}) == 0xcbf29ce484222325ULL);
    CHECK(slc::fnv1a64(std::string{"a"}) == 0xaf63dc4c8601ec8cULL);
    CHECK(slc::fnv1a64(std::string{"foobar"}) == 0x85944171f73967e8ULL);
    CHECK(slc::to_hex16(0) == "0000000000000000");
    CHECK(slc::to_hex16(0xdeadbeefULL) == "00000000deadbeef");
    CHECK(slc::to_hex16(0xffffffffffffffffULL) == "ffffffffffffffff");
}

TEST_CASE("string helpers handle edges", "[config_io]") {
    CHECK(slc::split("a,b,", ',') == std::vector<std::string>{"a", "b", ""});
    CHECK(slc::split("", ',') == std::vector<std::string>{""});
    CHECK(slc::split("one", ',') == std::vector<std::string>{"one"});
    CHECK(slc::join({"a", "b", ""}, ',') == "a,b,");
    CHECK(slc::join({}, ',') == "");
    CHECK(slc::trim("  x\t") == "x");
    CHECK(slc::trim("\r\r") == "");
    CHECK(slc::trim("a b") == "a b");
    CHECK(slc::split_lines("a\nb\n") == std::vector<std::string>{"a", "b"});
    CHECK(slc::split_lines("a\nb") == std::vector<std::string>{"a", "b"});
    CHECK(slc::split_lines("").empty());
    CHECK(slc::split_lines("\n") == std::vector<std::string>{""});
}

TEST_CASE("field files survive an encode-decode-encode cycle byte for byte", "[config_io]") {
    const auto d = sample_field_data();
    const std::string text = slc::encode_field_file(d);
    const auto back = slc::decode_field_file(text);
    CHECK(back.model_id == d.model_id);
    CHECK(back.field.T == d.field.T);
    CHECK(back.field.intervals == d.field.intervals);
    CHECK(back.field.names == d.field.names);
    CHECK(back.field.lo == d.field.lo);
    CHECK(back.field.hi == d.field.hi);
    CHECK(back.field.values == d.field.values);
    CHECK(back.seed_train == d.seed_train);
    CHECK(back.objective == d.objective);
    CHECK(back.converged == d.converged);
    CHECK(back.iterations == d.iterations);
    CHECK(slc::encode_field_file(back) == text);
}

TEST_CASE("field files detect corruption and malformed headers", "[config_io]") {
    const auto d = sample_field_data();
    const std::string text = slc::encode_field_file(d);

    auto flipped = text;
    const std::size_t mid = flipped.find("0,");  // first body row
    REQUIRE(mid != std::string::npos);
    flipped[mid + 2] = flipped[mid + 2] == '1' ? '2' : '1';
    CHECK_THROWS_AS(slc::decode_field_file(flipped), slc::IoError);
    CHECK_THROWS_WITH(slc::decode_field_file(flipped),
                      Catch::Matchers::ContainsSubstring("checksum"));

    // Truncation loses the checksum line entirely.
    const auto cut = text.substr(0, text.rfind("checksum"));
    CHECK_THROWS_AS(slc::decode_field_file(cut), slc::IoError);

    CHECK_THROWS_AS(slc::decode_field_file("not a field file"), slc::IoError);

    // An unknown header key is rejected even with a fixed-up checksum.
    auto injected = text;
    const auto pos = injected.find("seed_train");
    injected.insert(pos, "mystery = 1\n");
    const auto body_end = injected.rfind("checksum = fnv1a64:");
    auto fixed = injected.substr(0, body_end);
    fixed += "checksum = fnv1a64:" + slc::to_hex16(slc::fnv1a64(fixed)) + "\n";
    CHECK_THROWS_WITH(slc::decode_field_file(fixed),
                      Catch::Matchers::ContainsSubstring("mystery"));
}

TEST_CASE("field files round-trip through disk", "[config_io]") {
    const auto d = sample_field_data();
    const std::string path = temp_path("field.slc");
    slc::save_field_file(path, d);
    const auto back = slc::load_field_file(path);
    CHECK(back.field.values == d.field.values);
    CHECK(back.model_id == d.model_id);
    std::remove(path.c_str());
    CHECK_THROWS_AS(slc::load_field_file(path), slc::IoError);
}

TEST_CASE("run config defaults match the documented values", "[config_io]") {
    const slc::RunConfig cfg;
    CHECK(cfg.model.empty());
    CHECK(cfg.theta == 0.25);
    CHECK(cfg.nf == 5);
    CHECK(cfg.test_distribution == slc::TestDistribution::model_default);
    CHECK(cfg.n_test == 5000);
    CHECK(cfg.seed_train == 1);
    CHECK(cfg.seed_test == 1);
    CHECK(cfg.threads == 0);
    CHECK(cfg.out == ".");
    CHECK(cfg.eta0 == 0.0);
    CHECK(cfg.epsilon == 1e-4);
    CHECK(cfg.window == 100);
    CHECK(cfg.max_iterations == 20000);
    CHECK(cfg.shrink_factor == 0.5);
    CHECK(cfg.grow_factor == 1.1);
    CHECK_FALSE(cfg.allow_even_nf);
    CHECK_FALSE(cfg.dump_samples);
    CHECK(cfg.bounds == slc::default_sweep_bounds());
    CHECK(cfg.nf_list == slc::default_sweep_grid_sizes());
}

TEST_CASE("config text parses keys, comments, and blank lines", "[config_io]") {
    const std::string text =
        "# a comment\n"
        "model = coupled_charge\n"
        "\n"
        "theta = 0.2\n"
        "nf = 7\n"
        "seed_train = 99\n"
        "test_distribution = truncated_gaussian\n"
        "dump_samples = true\n"
        "bounds = 0.1,0.2,0.3\n"
        "nf_list = 1,5\n"
        "theta.theta_34 = 0.1\n"
        "nf.theta_34 = 3\n";
    const auto cfg = slc::parse_config_text(text);
    CHECK(cfg.model == "coupled_charge");
    CHECK(cfg.theta == 0.2);
    CHECK(cfg.nf == 7);
    CHECK(cfg.seed_train == 99);
    CHECK(cfg.test_distribution == slc::TestDistribution::truncated_gaussian);
    CHECK(cfg.dump_samples);
    CHECK(cfg.bounds == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(cfg.nf_list == std::vector<int>{1, 5});
    REQUIRE(cfg.theta_group.count("theta_34") == 1);
    CHECK(cfg.theta_group.at("theta_34") == 0.1);
    REQUIRE(cfg.nf_group.count("theta_34") == 1);
    CHECK(cfg.nf_group.at("theta_34") == 3);
}

TEST_CASE("config parsing rejects unknown keys by name with a line number", "[config_io]") {
    try {
        slc::parse_config_text("model = coupled_charge\nmodle = x\n");
        FAIL("expected ConfigError");
    } catch (const slc::ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("modle") != std::string::npos);
        CHECK(msg.find("line 2") != std::string::npos);
    }
}

TEST_CASE("config values are validated on entry", "[config_io]") {
    CHECK_THROWS_AS(slc::parse_config_text("model = nonsense\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("theta = 1.0\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("theta = -0.1\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("nf = 0\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("nf = notanumber\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("n_test = -5\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("threads = -1\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("epsilon = 0\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("shrink_factor = 1.5\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("grow_factor = 1.0\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("test_distribution = gauss\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("bounds = 0.2,0.1\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("bounds = 0.1,0.1\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("nf_list = 5,3\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("dump_samples = maybe\n"), slc::ConfigError);
    CHECK_THROWS_AS(slc::parse_config_text("out =\n"), slc::ConfigError);
    CHECK_NOTHROW(slc::parse_config_text("allow_even_nf = 1\nnf = 4\n"));
}

TEST_CASE("the resolved config echo re-parses to the identical configuration", "[config_io]") {
    slc::RunConfig cfg;
    cfg.model = "coupled_phase";
    cfg.theta = 0.1237890123456789;
    cfg.theta_group["theta_3"] = 0.0625;
    cfg.nf = 7;
    cfg.nf_group["theta_12"] = 9;
    cfg.test_distribution = slc::TestDistribution::uniform;
    cfg.n_test = 123;
    cfg.seed_train = 18446744073709551615ULL;
    cfg.seed_test = 7;
    cfg.threads = 3;
    cfg.out = "some/dir";
    cfg.eta0 = 0.0078125;
    cfg.epsilon = 3.5e-7;
    cfg.window = 42;
    cfg.max_iterations = 777;
    cfg.shrink_factor = 0.25;
    cfg.grow_factor = 1.0625;
    cfg.allow_even_nf = true;
    cfg.dump_samples = true;
    cfg.bounds = {0.0, 0.1237890123456789};
    cfg.nf_list = {1, 3, 9};

    const std::string echo = slc::resolved_config_text(cfg);
    const auto back = slc::parse_config_text(echo);
    CHECK(back.model == cfg.model);
    CHECK(back.theta == cfg.theta);
    CHECK(back.theta_group == cfg.theta_group);
    CHECK(back.nf == cfg.nf);
    CHECK(back.nf_group == cfg.nf_group);
    CHECK(back.test_distribution == cfg.test_distribution);
    CHECK(back.n_test == cfg.n_test);
    CHECK(back.seed_train == cfg.seed_train);
    CHECK(back.seed_test == cfg.seed_test);
    CHECK(back.threads == cfg.threads);
    CHECK(back.out == cfg.out);
    CHECK(back.eta0 == cfg.eta0);
    CHECK(back.epsilon == cfg.epsilon);
    CHECK(back.window == cfg.window);
    CHECK(back.max_iterations == cfg.max_iterations);
    CHECK(back.shrink_factor == cfg.shrink_factor);
    CHECK(back.grow_factor == cfg.grow_factor);
    CHECK(back.allow_even_nf == cfg.allow_even_nf);
    CHECK(back.dump_samples == cfg.dump_samples);
    CHECK(back.bounds == cfg.bounds);
    CHECK(back.nf_list == cfg.nf_list);

    // Echoing the re-parse reproduces the text itself.
    CHECK(slc::resolved_config_text(back) == echo);
}

TEST_CASE("configured_model applies the global bound and group overrides", "[config_io]") {
    slc::RunConfig cfg;
    cfg.model = "coupled_charge";
    cfg.theta = 0.2;
    cfg.theta_group["theta_34"] = 0.05;
    const auto m = slc::configured_model(cfg);
    CHECK(m.id == "coupled_charge");
    CHECK(m.params[0].bound == 0.2);
    CHECK(m.params[1].bound == 0.2);
    CHECK(m.params[2].bound == 0.05);
    CHECK(m.params[3].bound == 0.05);

    slc::RunConfig empty;
    CHECK_THROWS_AS(slc::configured_model(empty), slc::ConfigError);

    cfg.theta_group.clear();
    cfg.theta_group["nope"] = 0.1;
    CHECK_THROWS_AS(slc::configured_model(cfg), slc::ConfigError);
}

TEST_CASE("configured_grid_sizes follows group order and rejects even counts", "[config_io]") {
    slc::RunConfig cfg;
    cfg.model = "coupled_charge";
    cfg.nf = 5;
    const auto m = slc::configured_model(cfg);
    CHECK(slc::configured_grid_sizes(cfg, m) == std::vector<int>{5, 5});

    cfg.nf_group["theta_34"] = 3;
    CHECK(slc::configured_grid_sizes(cfg, m) == std::vector<int>{5, 3});

    cfg.nf_group.clear();
    cfg.nf_group["ghost"] = 3;
    CHECK_THROWS_AS(slc::configured_grid_sizes(cfg, m), slc::ConfigError);

    cfg.nf_group.clear();
    cfg.nf = 4;
    CHECK_THROWS_AS(slc::configured_grid_sizes(cfg, m), slc::ConfigError);
    cfg.allow_even_nf = true;
    CHECK(slc::configured_grid_sizes(cfg, m) == std::vector<int>{4, 4});

    // The error text explains why even counts are suspicious.
    cfg.allow_even_nf = false;
    try {
        slc::configured_grid_sizes(cfg, m);
        FAIL("expected ConfigError");
    } catch (const slc::ConfigError& e) {
        CHECK(std::string(e.what()).find("allow_even_nf") != std::string::npos);
    }
}

TEST_CASE("optimizer settings map through from the run config", "[config_io]") {
    slc::RunConfig cfg;
    cfg.eta0 = 0.125;
    cfg.epsilon = 1e-5;
    cfg.window = 33;
    cfg.max_iterations = 4444;
    cfg.shrink_factor = 0.375;
    cfg.grow_factor = 1.25;
    const auto oc = slc::optimizer_config(cfg, 2);
    CHECK(oc.initial_step == 0.125);
    CHECK(oc.epsilon == 1e-5);
    CHECK(oc.window == 33);
    CHECK(oc.max_iterations == 4444);
    CHECK(oc.shrink_factor == 0.375);
    CHECK(oc.grow_factor == 1.25);
    CHECK(oc.threads == 2);
}

TEST_CASE("config files load from disk with base overlay semantics", "[config_io]") {
    const std::string path = temp_path("run.cfg");
    slc::write_text_file(path, "model = single_charge_excited\ntheta = 0.15\n");
    const auto cfg = slc::load_config_file(path);
    CHECK(cfg.model == "single_charge_excited");
    CHECK(cfg.theta == 0.15);
    CHECK(cfg.nf == 5);  // untouched default

    slc::RunConfig base;
    base.nf = 9;
    const auto over = slc::load_config_file(path, base);
    CHECK(over.nf == 9);
    CHECK(over.theta == 0.15);

    std::remove(path.c_str());
    CHECK_THROWS_AS(slc::load_config_file(path), slc::IoError);
}
