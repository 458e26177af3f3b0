#include "ngsim/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "ngsim/errors.hpp"

namespace ngsim {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw ParameterError("format_double: conversion failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ParameterError("not a number: '" + std::string(text) + "'");
  return value;
}

}  // namespace ngsim
