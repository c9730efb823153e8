#include "mzi/mzi.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "mzi/error.hpp"
#include "mzi/scenario.hpp"
#include "mzi/state.hpp"

struct mzi_scenario {
  mzi::Scenario value;
};

struct mzi_report {
  mzi::RunReport value;
};

namespace {

thread_local std::string last_error;

mzi_status fail(mzi_status status, const char* what) {
  last_error = what;
  return status;
}

template <class F>
mzi_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return MZI_OK;
  } catch (const mzi::Error& e) {
    return fail(static_cast<mzi_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MZI_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(MZI_INTERNAL_ERROR, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mzi::Mirror to_mirror(mzi_port p) {
  if (p < MZI_PORT_E || p > MZI_PORT_F)
    throw mzi::Error(mzi::ErrorCode::InvalidParameter, "port out of range");
  return static_cast<mzi::Mirror>(p);
}

void require(const void* p, const char* what) {
  if (!p) throw mzi::Error(mzi::ErrorCode::InvalidParameter, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* mzi_last_error(void) { return last_error.c_str(); }

const char* mzi_status_name(mzi_status status) {
  if (status == MZI_OK) return "Ok";
  if (status == MZI_INTERNAL_ERROR) return "InternalError";
  return mzi::error_code_name(static_cast<mzi::ErrorCode>(status));
}

void mzi_string_free(char* s) { std::free(s); }

size_t mzi_builtin_count(void) { return mzi::kBuiltinScenarios.size(); }

const char* mzi_builtin_name(size_t i) {
  return i < mzi::kBuiltinScenarios.size() ? mzi::kBuiltinScenarios[i].data() : nullptr;
}

mzi_status mzi_scenario_builtin(const char* name, mzi_scenario** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new mzi_scenario{mzi::build_scenario(name)};
  });
}

mzi_status mzi_scenario_parse(const char* json_text, mzi_scenario** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new mzi_scenario{mzi::parse_scenario(json_text)};
  });
}

mzi_status mzi_scenario_load(const char* path, mzi_scenario** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mzi_scenario{mzi::load_scenario(path)};
  });
}

mzi_status mzi_scenario_set(mzi_scenario* s, const char* param, double value) {
  return guarded([&] {
    require(s, "scenario");
    require(param, "param");
    mzi::Scenario updated = s->value;
    mzi::set_param(updated, param, value);
    try {
      mzi::validate_scenario(updated);
    } catch (const mzi::Error& e) {
      throw mzi::Error(mzi::ErrorCode::InvalidOverride, std::string("invalid override: ") + e.what());
    }
    s->value = std::move(updated);
  });
}

mzi_status mzi_scenario_get(const mzi_scenario* s, const char* param, double* out) {
  return guarded([&] {
    require(s, "scenario");
    require(param, "param");
    require(out, "out");
    *out = mzi::get_param(s->value, param);
  });
}

mzi_status mzi_scenario_emit(const mzi_scenario* s, char** json_out) {
  return guarded([&] {
    require(s, "scenario");
    require(json_out, "json_out");
    *json_out = dup(mzi::emit_scenario(s->value));
  });
}

mzi_status mzi_scenario_sweep_spec(const mzi_scenario* s, const char** param, const double** values,
                                   size_t* count) {
  return guarded([&] {
    require(s, "scenario");
    require(param, "param");
    require(values, "values");
    require(count, "count");
    if (s->value.sweep) {
      *param = s->value.sweep->param.c_str();
      *values = s->value.sweep->values.data();
      *count = s->value.sweep->values.size();
    } else {
      *param = nullptr;
      *values = nullptr;
      *count = 0;
    }
  });
}

void mzi_scenario_free(mzi_scenario* s) { delete s; }

mzi_status mzi_weak_value(const mzi_scenario* s, mzi_port port, double* re, double* im) {
  return guarded([&] {
    require(s, "scenario");
    require(re, "re");
    require(im, "im");
    const auto w = mzi::weak_value(mzi::validate_scenario(s->value), to_mirror(port));
    *re = w.real();
    *im = w.imag();
  });
}

mzi_status mzi_joint_weak_value(const mzi_scenario* s, mzi_port p1, mzi_port p2, double* re, double* im) {
  return guarded([&] {
    require(s, "scenario");
    require(re, "re");
    require(im, "im");
    const auto w = mzi::joint_weak_value(mzi::validate_scenario(s->value), to_mirror(p1), to_mirror(p2));
    *re = w.real();
    *im = w.imag();
  });
}

mzi_status mzi_weak_values_json(const mzi_scenario* s, char** json_out) {
  return guarded([&] {
    require(s, "scenario");
    require(json_out, "json_out");
    *json_out = dup(mzi::weak_values_json(s->value));
  });
}

mzi_status mzi_run(const mzi_scenario* s, mzi_report** out) {
  return guarded([&] {
    require(s, "scenario");
    require(out, "out");
    *out = new mzi_report{mzi::run(s->value)};
  });
}

mzi_status mzi_sweep(const mzi_scenario* s, const char* param, const double* values, size_t count,
                     mzi_report** out) {
  return guarded([&] {
    require(s, "scenario");
    require(param, "param");
    require(out, "out");
    if (count > 0) require(values, "values");
    *out = new mzi_report{mzi::sweep(s->value, param, {values, count})};
  });
}

int mzi_report_all_pass(const mzi_report* r) { return r && r->value.all_pass() ? 1 : 0; }

size_t mzi_report_verdict_count(const mzi_report* r) { return r ? r->value.verdicts.size() : 0; }

mzi_status mzi_report_verdict(const mzi_report* r, size_t i, const char** claim, int* pass, double* measured,
                              double* limit) {
  return guarded([&] {
    require(r, "report");
    if (i >= r->value.verdicts.size())
      throw mzi::Error(mzi::ErrorCode::InvalidParameter, "verdict index out of range");
    const auto& v = r->value.verdicts[i];
    if (claim) *claim = v.claim.c_str();
    if (pass) *pass = v.pass ? 1 : 0;
    if (measured) *measured = v.measured;
    if (limit) *limit = v.limit;
  });
}

mzi_status mzi_report_json(const mzi_report* r, char** json_out) {
  return guarded([&] {
    require(r, "report");
    require(json_out, "json_out");
    *json_out = dup(mzi::report_json(r->value));
  });
}

mzi_status mzi_report_write(const mzi_report* r, const char* dir, int dump_timeseries) {
  return guarded([&] {
    require(r, "report");
    require(dir, "dir");
    mzi::write_report_files(r->value, dir, dump_timeseries != 0);
  });
}

void mzi_report_free(mzi_report* r) { delete r; }

}  // extern "C"
