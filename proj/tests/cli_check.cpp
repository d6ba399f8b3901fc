// Exercises the command-line surface: exit code classes, report output, and
// the stamped CSV formats. Takes the binary path as argv[1].

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string g_cli;
int g_failures = 0;

void expect(bool condition, const std::string& what) {
  if (!condition) {
    std::printf("FAIL %s\n", what.c_str());
    ++g_failures;
  }
}

int run(const std::string& args, std::string* output = nullptr) {
  fs::path capture = fs::temp_directory_path() / "taxiflow_cli_check_out.txt";
  std::string command = g_cli + " " + args + " >" + capture.string() + " 2>&1";
  int status = std::system(command.c_str());
  if (output != nullptr) {
    std::ifstream in(capture);
    output->assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  fs::remove(capture);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: cli_check <taxiflow binary>\n");
    return 2;
  }
  g_cli = argv[1];
  fs::path dir = fs::temp_directory_path() / "taxiflow_cli_check";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string();

  // Usage errors: no subcommand, missing required flags.
  expect(run("") == 2, "no subcommand exits 2");
  expect(run("ingest") == 2, "ingest without arguments exits 2");
  expect(run("test --trips x.csv") == 2, "test without required flags exits 2");
  expect(run("--help") == 0, "--help exits 0");

  // Input errors: missing files and configs.
  expect(run("ingest missing.csv --out " + d + "/s.csv") == 3, "missing trip file exits 3");
  expect(run("ingest missing.csv --schema nope.cfg --out " + d + "/s.csv") == 3,
         "missing schema exits 3");
  expect(run("shifts --trips missing.csv --out-dir " + d) == 3, "missing store exits 3");

  // Data error: header-only input accepts nothing.
  {
    std::ofstream out(dir / "empty.csv");
    out << "medallion,hack_license,pickup_time,dropoff_time,pickup_lat,pickup_lon,"
           "dropoff_lat,dropoff_lon,trip_distance,fare_total\n";
  }
  expect(run("ingest " + d + "/empty.csv --out " + d + "/empty_store.csv") == 4,
         "zero accepted rows exits 4");

  // A working end-to-end chain.
  expect(run("simulate --out-dir " + d + "/sim --score") == 0, "simulate with defaults exits 0");
  std::string report;
  expect(run("ingest " + d + "/sim/trips.csv --out " + d + "/store.csv", &report) == 0,
         "ingest of simulated trips exits 0");
  expect(report.find("rows accepted") != std::string::npos, "ingest prints a report");
  expect(run("shifts --trips " + d + "/store.csv --out-dir " + d + "/shifts") == 0,
         "shifts exits 0");
  expect(run("analyze --trips " + d + "/store.csv --weather " + d + "/sim/weather.csv --out-dir " +
             d + "/analyze --svg") == 0,
         "analyze exits 0");
  expect(run("test --trips " + d + "/store.csv --weather " + d +
             "/sim/weather.csv --pseudo-days 25 --seed 2 --out " + d + "/tests.csv") == 0,
         "test exits 0");

  // Output shapes: manifest stamp plus documented headers.
  std::string shifts_csv = slurp(dir / "shifts" / "shifts.csv");
  expect(shifts_csv.rfind("# manifest=", 0) == 0, "shift csv is manifest-stamped");
  expect(shifts_csv.find("driver,start,end,n_pickups,income,occupied_s,empty_s") != std::string::npos,
         "shift csv header");
  std::string density_csv = slurp(dir / "shifts" / "shift_start_density.csv");
  expect(density_csv.find("bin_start_minutes,density") != std::string::npos, "density csv header");
  std::string bins_csv = slurp(dir / "analyze" / "bins.csv");
  expect(bins_csv.find("hour,cell,supply,pickups,income,occupied_s,empty_s,dist_km,travel_s,rainy") !=
             std::string::npos,
         "bins csv header");
  std::string comparisons_csv = slurp(dir / "analyze" / "comparisons.csv");
  expect(comparisons_csv.find("slot,index,clear_mean,rainy_mean,n_clear,n_rainy,masked") !=
             std::string::npos,
         "comparisons csv header");
  std::string tests_csv = slurp(dir / "tests.csv");
  expect(tests_csv.find("day_class,test,perm_statistic,perm_pvalue,obs_statistic,obs_pvalue") !=
             std::string::npos,
         "test results csv header");
  expect(tests_csv.find("weekday,mann_whitney") != std::string::npos, "test rows present");
  std::string recovery_csv = slurp(dir / "sim" / "recovery.csv");
  expect(recovery_csv.find("supply_mae,0") != std::string::npos,
         "recovery on rule-consistent output has zero supply error");
  expect(fs::exists(dir / "analyze" / "pickups_per_driver.svg"), "svg written when requested");
  std::string svg = slurp(dir / "analyze" / "pickups_per_driver.svg");
  expect(svg.rfind("<!-- manifest=", 0) == 0, "svg carries the manifest stamp");

  // Unknown station id is a data error.
  expect(run("analyze --trips " + d + "/store.csv --weather " + d +
             "/sim/weather.csv --ref-station atlantis --out-dir " + d + "/bad") == 4,
         "unknown reference station exits 4");

  // Analyze also writes the classified hourly weather.
  std::string classified = slurp(dir / "analyze" / "classified_weather.csv");
  expect(classified.find("hour,precip_mm,rainy,imputed") != std::string::npos,
         "classified weather csv header");

  // Config files resolve through TAXIFLOW_CONFIG_DIR.
  fs::create_directories(dir / "configs");
  {
    std::ofstream out(dir / "configs" / "win.cfg");
    out << "morning_peak=6,7,8,9\nevening_peak=16,17,18,19\n";
  }
  setenv("TAXIFLOW_CONFIG_DIR", (dir / "configs").string().c_str(), 1);
  expect(run("analyze --trips " + d + "/store.csv --weather " + d +
             "/sim/weather.csv --windows win.cfg --out-dir " + d + "/envcfg") == 0,
         "window config found via TAXIFLOW_CONFIG_DIR");
  unsetenv("TAXIFLOW_CONFIG_DIR");

  fs::remove_all(dir);
  if (g_failures == 0) {
    std::printf("cli_check: all checks passed\n");
    return 0;
  }
  std::printf("cli_check: %d failures\n", g_failures);
  return 1;
}
