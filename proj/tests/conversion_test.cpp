#include "adapterforge/conversion.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "adapterforge/error.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace adapterforge::analyser {
namespace {

using spec::Prim;
using spec::Value;

TypeKey key(Prim p, std::optional<std::string> unit = std::nullopt)
{
  return {{p, 0}, std::move(unit)};
}

ErrorCode code_of(const std::function<void()>& fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Syntax;
}

TEST(ConversionTable, BuiltinMatchesShippedFile)
{
  auto shipped = ConversionTable::load((testing::source_dir() / "data" / "conversions.txt").string());
  EXPECT_EQ(shipped.entries(), ConversionTable::builtin().entries());
  EXPECT_EQ(ConversionTable::builtin().size(), 15u);
}

TEST(ConversionTable, TextRoundTrip)
{
  auto t = ConversionTable::builtin();
  EXPECT_EQ(ConversionTable::parse(t.to_text()).entries(), t.entries());
}

TEST(ConversionTable, DirectionalLookup)
{
  auto t = ConversionTable::builtin();
  const auto* ms_to_s = t.find(key(Prim::F64, "ms"), key(Prim::F64, "s"));
  ASSERT_NE(ms_to_s, nullptr);
  EXPECT_EQ(ms_to_s->kind, RuleKind::UnitScale);
  EXPECT_EQ(ms_to_s->factor, Rational(1, 1000));
  EXPECT_NE(t.find(key(Prim::I32), key(Prim::I64)), nullptr);
  EXPECT_EQ(t.find(key(Prim::F64), key(Prim::I32)), nullptr);
}

TEST(ConversionTable, RejectsInadmissibleRules)
{
  ConversionTable t;
  EXPECT_EQ(code_of([&] { t.add({key(Prim::I32), key(Prim::I32), RuleKind::Widen, Rational(1)}); }),
            ErrorCode::Config);
  EXPECT_EQ(code_of([&] { t.add({key(Prim::F64, "ms"), key(Prim::F64, "s"), RuleKind::UnitScale, Rational(0)}); }),
            ErrorCode::Config);
  t.add({key(Prim::I32), key(Prim::I64), RuleKind::Widen, Rational(1)});
  EXPECT_EQ(code_of([&] { t.add({key(Prim::I32), key(Prim::I64), RuleKind::Widen, Rational(1)}); }),
            ErrorCode::Config);
  EXPECT_EQ(code_of([] { ConversionTable::parse("i32 - i64 - WIDEN 1\n"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { ConversionTable::parse("i32 - i64 - STRETCH 1 1\n"); }), ErrorCode::Config);
}

TEST(ApplyConversion, NarrowCheckedOutOfRange)
{
  ConversionRule narrow{key(Prim::I64), key(Prim::I32), RuleKind::NarrowChecked, Rational(1)};
  EXPECT_EQ(code_of([&] { apply_conversion(narrow, Value(std::int64_t{1} << 40)); }), ErrorCode::Narrow);
  EXPECT_EQ(apply_conversion(narrow, Value(123)), Value(123));
}

TEST(ApplyConversion, ScaleAndFormat)
{
  auto t = ConversionTable::builtin();
  EXPECT_EQ(apply_conversion(*t.find(key(Prim::F64, "ms"), key(Prim::F64, "s")), Value(1500.0)), Value(1.5));
  EXPECT_EQ(apply_conversion(*t.find(key(Prim::I64, "s"), key(Prim::I64, "ms")), Value(3)), Value(3000));
  EXPECT_EQ(code_of([&] { apply_conversion(*t.find(key(Prim::I64, "ms"), key(Prim::I64, "s")), Value(1500)); }),
            ErrorCode::Narrow);
  EXPECT_EQ(apply_conversion(*t.find(key(Prim::I32), key(Prim::String)), Value(-42)), Value("-42"));
  EXPECT_EQ(apply_conversion(*t.find(key(Prim::String), key(Prim::I64)), Value("17")), Value(17));
  EXPECT_EQ(code_of([&] { apply_conversion(*t.find(key(Prim::String), key(Prim::I64)), Value("x1")); }),
            ErrorCode::Convert);
  EXPECT_EQ(code_of([&] { apply_conversion(*t.find(key(Prim::I32), key(Prim::I64)), Value("7")); }),
            ErrorCode::Convert);
}

TEST(ApplyConversion, AgreesWithOracleOnRandomValues)
{
  auto table = ConversionTable::builtin();
  auto rules = testing::to_oracle_rules(table);
  auto entries = table.entries();
  testing::Rng rng(31);
  for (std::size_t r = 0; r < entries.size(); ++r) {
    for (int i = 0; i < 200; ++i) {
      Value v;
      switch (entries[r].from.type.base) {
        case Prim::String:
          v = testing::chance(rng, 0.7) ? Value(std::to_string(testing::uniform(rng, -100000, 100000)))
                                        : Value(testing::random_identifier(rng, "s"));
          break;
        case Prim::F64:
          v = testing::chance(rng, 0.5) ? Value(static_cast<double>(testing::uniform(rng, -1000000, 1000000)))
                                        : Value(testing::uniform(rng, -4000, 4000) / 8.0);
          break;
        default:
          v = testing::chance(rng, 0.1) ? Value(std::int64_t{1} << testing::uniform(rng, 30, 62))
                                        : Value(testing::uniform(rng, -100000, 100000));
          break;
      }
      auto expected = testing::oracle_convert(rules[r], v);
      try {
        auto got = apply_conversion(entries[r], v);
        ASSERT_TRUE(std::holds_alternative<Value>(expected)) << entries[r].to_string();
        EXPECT_EQ(got, std::get<Value>(expected)) << entries[r].to_string();
      } catch (const Error& e) {
        ASSERT_TRUE(std::holds_alternative<std::string>(expected)) << entries[r].to_string() << " " << e.what();
        EXPECT_EQ(to_string(e.code()), std::get<std::string>(expected));
      }
    }
  }
}

}  // namespace
}  // namespace adapterforge::analyser
